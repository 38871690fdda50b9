#include "doctest.h"

#include <cmath>

#include "ri2d/excursions.hpp"
#include "ri2d/potential.hpp"

using namespace ri2d;

TEST_CASE("count and time threshold formulas")
{
    const double e = 2.718281828459045235;
    CHECK(std::abs(psi(16, 1.0, e) - 9.719627403010996) < 1e-9);
    CHECK(std::abs(psi(32, 1.0, e) - 15.407351158409979) < 1e-9);
    CHECK(std::abs(psi(64, 0.5, e) - 25.701466360937147) < 1e-9);
    CHECK(std::abs(t_threshold(48, 1.0) - 28591.12818690343) < 1e-6);
}

TEST_CASE("coverage bookkeeping")
{
    Excursion e;
    e.path.sites = {{0, 1}, {0, 0}, {1, 0}, {0, 0}, {-1, 0}, {0, 0}, {0, -1}};
    e.entry = e.path.sites.front();
    e.exit = e.path.sites.back();
    const auto full = coverage_report({{0, 0}, 1.0}, {e});
    CHECK(full.complete);
    CHECK(full.uncovered_count() == 0);

    e.path.sites = {{0, 1}, {0, 0}, {1, 0}};
    const auto partial = coverage_report({{0, 0}, 1.0}, {e});
    CHECK(!partial.complete);
    CHECK(partial.uncovered_count() == 2);
}

TEST_CASE("sampling a finite measure matches its weights")
{
    HarmonicMeasure hm;
    hm.support = {{0, 0}, {5, 5}};
    hm.weights = {0.25, 0.75};
    RngStream rng(1, 0);
    int hit = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i)
        if (sample_site(hm, rng) == Site{5, 5}) ++hit;
    CHECK(std::abs(double(hit) / n - 0.75) < 4.0 * std::sqrt(0.1875 / n));
}

TEST_CASE("iid excursions run between the right boundaries")
{
    const int n = 8;
    const double gamma = 2.718281828459045235;
    const auto A = ball_sites({{0, 0}, double(n)});
    const HarmonicMeasure entry =
        conditional_harmonic_measure(A, {{0, 0}, gamma * n});
    RngStream rng(2, 0);
    const auto exc = sample_iid_excursions(n, gamma, 25, entry, rng);
    REQUIRE(exc.size() == 25);
    for (const auto& e : exc) {
        CHECK(norm(e.entry) <= double(n));
        CHECK(entry.weight_of(e.entry) > 0.0);
        CHECK(norm(e.exit) <= gamma * n);
        CHECK(norm(e.exit) > gamma * n - 1.5);
        CHECK(e.path.sites.front() == e.entry);
        CHECK(e.path.sites.back() == e.exit);
    }
}

TEST_CASE("torus experiment produces excursions and tracks coverage")
{
    RngStream rng(3, 0);
    const auto res = torus_excursion_experiment(12, 2.718281828459045235, 1.0, rng);
    CHECK(res.count > 0);
    CHECK(res.entries.size() == res.count);
    for (const Site& s : res.entries) CHECK(norm(s) <= 12.0);
    CHECK(res.coverage.target.size() == ball_sites({{0, 0}, 12.0}).size());
}

TEST_CASE("disk packing produces disjoint disks inside the big ball")
{
    const double n = 1000, h = 40, gamma = 2.718281828459045235;
    const PackingLayout p = disk_packing(n, h, gamma);
    CHECK(p.inner_radius == n / h);
    CHECK(p.outer_radius == gamma * n / h);
    CHECK(p.centers.size() >= std::size_t(h * h / 16.0)); // Theta(h^2) count
    for (std::size_t i = 0; i < p.centers.size(); ++i) {
        CHECK(norm(p.centers[i]) + p.outer_radius <= n + 1e-9);
        for (std::size_t j = i + 1; j < p.centers.size(); ++j)
            CHECK(norm(p.centers[i] - p.centers[j]) >= 2 * p.outer_radius - 1e-9);
    }
}
