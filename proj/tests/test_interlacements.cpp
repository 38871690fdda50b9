#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "ri2d/experiments.hpp"
#include "ri2d/interlacements.hpp"

using namespace ri2d;

namespace {
const PotentialTable& table() { return shared_potential(); }
}

TEST_CASE("entry measure of a pair is concentrated on the non-origin site")
{
    const HarmonicMeasure hm = bundle_entry_measure({{0, 0}, {1, 0}}, table());
    REQUIRE(hm.support.size() == 1);
    CHECK(hm.support[0] == Site{1, 0});
    CHECK(std::abs(hm.weights[0] - 1.0) < 1e-12);
}

TEST_CASE("hitting bundles visit K and carry consistent metadata")
{
    const std::vector<Site> K = {{0, 0}, {1, 0}};
    RngStream rng(31, 0);
    for (int rep = 0; rep < 30; ++rep) {
        RngStream r = rng.derive(rep);
        const HittingBundle b = sample_hitting_bundle(K, 1.5, 50.0, table(), r);
        CHECK(b.trajectories.size() == b.xi_K);
        CHECK(b.inner_span.size() == b.xi_K);
        for (std::size_t t = 0; t < b.trajectories.size(); ++t) {
            const auto& sites = b.trajectories[t].sites;
            CHECK(std::find(sites.begin(), sites.end(), Site{1, 0}) != sites.end());
            const auto [lo, hi] = b.inner_span[t];
            CHECK(lo <= hi);
            CHECK(hi < sites.size());
            // both ends die beyond the kill radius
            CHECK(norm(sites.front()) > 50.0);
            CHECK(norm(sites.back()) > 50.0);
        }
        if (b.xi_K > 0) CHECK(b.D_K >= 1.0);
    }
}

TEST_CASE("xi_K mean tracks pi alpha cap")
{
    const std::vector<Site> K = {{0, 0}, {1, 0}};
    const double lambda = 3.141592653589793 * 1.0 * capacity(K, table()).value;
    RngStream rng(32, 0);
    const int n = 3000;
    double s = 0;
    for (int i = 0; i < n; ++i) {
        RngStream r = rng.derive(i);
        s += double(sample_hitting_bundle(K, 1.0, 50.0, table(), r).xi_K);
    }
    CHECK(std::abs(s / n - lambda) < 4.0 * std::sqrt(lambda / n));
}

TEST_CASE("decompose partitions by intersection with K")
{
    CompressedPath hit, miss;
    hit.sites = {{5, 0}, {4, 0}, {3, 0}};
    miss.sites = {{5, 5}, {5, 6}};
    const SiteSet K = {{3, 0}};
    const auto [with_k, without_k] = decompose({hit, miss}, K);
    REQUIRE(with_k.size() == 1);
    REQUIRE(without_k.size() == 1);
    CHECK(with_k[0].sites == hit.sites);
    CHECK(without_k[0].sites == miss.sites);
}

TEST_CASE("noodles are the maximal host runs and reconstruct local times")
{
    CompressedPath t;
    t.sites = {{-3, 0}, {-2, 0}, {-1, 0}, {0, 0}, {1, 0},
               {2, 0},  {1, 0},  {0, 0},  {0, 1}, {0, 2}};
    const SiteSet host = {{-1, 0}, {0, 0}, {1, 0}, {0, 1}};
    const NoodleConfig cfg = noodle_config({t}, host);
    REQUIRE(cfg.noodles.size() == 2);
    CHECK(cfg.local_time({0, 0}) == 2);
    CHECK(cfg.local_time({1, 0}) == 2);
    CHECK(cfg.local_time({-1, 0}) == 1);
    CHECK(cfg.local_time({0, 1}) == 1);
    CHECK(cfg.local_time({2, 0}) == 0); // outside the host
}

TEST_CASE("canonical serialization is order independent")
{
    Noodle a, b;
    a.trajectory_id = 0;
    a.sites = {{0, 0}, {1, 0}};
    b.trajectory_id = 1;
    b.sites = {{5, 5}};
    NoodleConfig ab, ba;
    ab.noodles = {a, b};
    ba.noodles = {b, a};
    ba.noodles[0].trajectory_id = 9; // ids must not matter
    CHECK(ab.same_noodles(ba));
    CHECK(ab.canonical_bytes() == ba.canonical_bytes());
    ba.noodles[1].sites.push_back({1, 1});
    CHECK(!ab.same_noodles(ba));
    CHECK(ab.canonical_bytes() != ba.canonical_bytes());
}

TEST_CASE("thinning keeps a sub-multiset of trajectories")
{
    const std::vector<Site> K = {{0, 0}, {1, 0}};
    RngStream rng(33, 0);
    for (int rep = 0; rep < 40; ++rep) {
        RngStream r = rng.derive(rep);
        const HittingBundle b = sample_hitting_bundle(K, 2.0, 50.0, table(), r);
        const HittingBundle thin = alpha_thinning(b, 1.0, r);
        CHECK(thin.alpha == 1.0);
        CHECK(thin.xi_K <= b.xi_K);
        CHECK(thin.trajectories.size() == thin.xi_K);
        for (const auto& t : thin.trajectories) {
            const bool present = std::any_of(
                b.trajectories.begin(), b.trajectories.end(),
                [&](const CompressedPath& o) { return o.sites == t.sites; });
            CHECK(present);
        }
    }
}

TEST_CASE("vacant window at rate zero is the full window")
{
    const Disk window{{6, 0}, 2.0};
    RngStream rng(34, 0);
    const SiteSet vacant = vacant_set_window(window, 0.0, 64.0, table(), rng);
    CHECK(vacant.size() == ball_sites(window).size());
}

TEST_CASE("high rate leaves the window mostly covered")
{
    const Disk window{{6, 0}, 2.0};
    RngStream rng(35, 0);
    std::size_t vacant_total = 0;
    const int reps = 20;
    for (int i = 0; i < reps; ++i) {
        RngStream r = rng.derive(i);
        vacant_total += vacant_set_window(window, 8.0, 96.0, table(), r).size();
    }
    CHECK(vacant_total < reps * ball_sites(window).size() / 4);
}
