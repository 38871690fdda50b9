#include "doctest.h"

#include <cmath>

#include "ri2d/experiments.hpp"
#include "ri2d/walks.hpp"

using namespace ri2d;

namespace {
const PotentialTable& table() { return shared_potential(); }
}

TEST_CASE("conditioned step distribution is the a-ratio tilt")
{
    const Site x{3, 1};
    const auto p = conditioned_step_distribution(x, table());
    double total = 0;
    const auto nb = neighbors(x);
    for (int i = 0; i < 4; ++i) {
        CHECK(std::abs(p[i] - table().at(nb[i]) / (4.0 * table().at(x))) < 1e-12);
        total += p[i];
    }
    CHECK(std::abs(total - 1.0) < 1e-10); // harmonicity off the origin
}

TEST_CASE("srw_path stops at the predicate")
{
    RngStream rng(3, 0);
    const auto p = srw_path({0, 0}, [](const Site& s) { return norm_sq(s) >= 25; },
                            rng);
    CHECK(norm_sq(p.sites.back()) >= 25);
    for (std::size_t i = 0; i + 1 < p.sites.size(); ++i) {
        CHECK(norm_sq(p.sites[i]) < 25);
        CHECK(norm_sq(p.sites[i + 1] - p.sites[i]) == 1);
    }
}

TEST_CASE("conditioned path avoids the origin and honors the taboo")
{
    RngStream rng(4, 0);
    const SiteSet taboo = {{0, 3}, {3, 0}, {-3, 0}, {0, -3}};
    for (int rep = 0; rep < 50; ++rep) {
        const auto p = conditioned_path(
            {1, 1}, [](const Site& s) { return norm_sq(s) >= 100; }, table(), rng,
            1'000'000, &taboo);
        for (const Site& s : p.sites) {
            CHECK(s != Site{0, 0});
            CHECK(!taboo.contains(s));
        }
        CHECK(norm_sq(p.sites.back()) >= 100);
    }
}

TEST_CASE("excursion extraction on a crafted path")
{
    PathSegment path;
    // in A' (far), down into A, back out to A', again into A, truncated inside
    path.sites = {{10, 0}, {9, 0}, {8, 0}, {9, 0}, {10, 0},
                  {9, 0},  {8, 0}, {7, 0}};
    const auto in_dA = [](const Site& s) { return norm_sq(s) <= 64; };
    const auto in_dAprime = [](const Site& s) { return norm_sq(s) >= 100; };
    const auto exc = extract_excursions(path, in_dA, in_dAprime);
    REQUIRE(exc.size() == 1); // second entry never returns to A'
    CHECK(exc[0].entry == Site{8, 0});
    CHECK(exc[0].exit == Site{10, 0});
}

TEST_CASE("disk exit tables sample on the first exterior ring")
{
    const auto& tables = DiskExitTables::instance();
    CHECK(tables.usable_radius(100.0) == 64);
    CHECK(tables.usable_radius(7.0) == 0);
    RngStream rng(6, 0);
    for (int i = 0; i < 200; ++i) {
        const Site e = tables.sample_exit(16, rng);
        CHECK(norm(e) > 16.0);
        CHECK(norm(e) <= 17.0 + 1e-9);
    }
}

TEST_CASE("compressed walk structure: unit steps except at declared jumps")
{
    RngStream rng(7, 0);
    const Disk zone{{0, 0}, 8.0};
    for (int rep = 0; rep < 20; ++rep) {
        const CompressedWalk w =
            conditioned_walk_far({5, 0}, 300.0, table(), rng, {&zone, 1});
        CHECK(w.outcome == WalkOutcome::killed);
        CHECK(norm(w.path.sites.back()) > 300.0);
        std::size_t jb = 0;
        for (std::size_t k = 0; k + 1 < w.path.sites.size(); ++k) {
            const bool is_jump =
                jb < w.path.jump_breaks.size() && w.path.jump_breaks[jb] == k;
            if (is_jump) {
                ++jb;
            } else {
                CHECK(norm_sq(w.path.sites[k + 1] - w.path.sites[k]) == 1);
            }
            CHECK(w.path.sites[k] != Site{0, 0});
        }
    }
}

TEST_CASE("disk jumps preserve the taboo-hitting probability")
{
    // reference walk forced to unit steps via an enormous fine margin
    RngStream rng(8, 0);
    const Disk zone{{0, 0}, 4.0};
    SiteSet taboo;
    for (const Site& s : ball_sites({{0, 0}, 3.0}))
        if (s != Site{0, 0}) taboo.insert(s);
    const int n = 4000;
    int hit_fast = 0, hit_unit = 0;
    for (int i = 0; i < n; ++i) {
        const auto fast = conditioned_walk_far({10, 0}, 60.0, table(), rng,
                                               {&zone, 1}, &taboo);
        if (fast.outcome == WalkOutcome::hit_taboo) ++hit_fast;
        const auto unit = conditioned_walk_far({10, 0}, 60.0, table(), rng,
                                               {&zone, 1}, &taboo, 1e9);
        if (unit.outcome == WalkOutcome::hit_taboo) ++hit_unit;
    }
    const double pf = double(hit_fast) / n, pu = double(hit_unit) / n;
    const double sd = std::sqrt(2.0 * 0.25 / n);
    CHECK(std::abs(pf - pu) < 4.0 * sd);
}
