#include "doctest.h"

#include <algorithm>

#include "ri2d/lattice.hpp"

using namespace ri2d;

TEST_CASE("ball_sites counts")
{
    CHECK(ball_sites({{0, 0}, 0.0}).size() == 1);
    CHECK(ball_sites({{0, 0}, 1.0}).size() == 5);
    CHECK(ball_sites({{0, 0}, 2.0}).size() == 13);
    CHECK(ball_sites({{7, -3}, 2.0}).size() == 13);
}

TEST_CASE("inner_boundary of a small ball")
{
    const auto b2 = ball_sites({{0, 0}, 2.0});
    const auto ib = inner_boundary(b2);
    CHECK(ib.size() == 8); // the extreme ring; (1,0) etc. are interior
    CHECK(std::find(ib.begin(), ib.end(), Site{0, 0}) == ib.end());
    CHECK(std::find(ib.begin(), ib.end(), Site{1, 0}) == ib.end());
    CHECK(std::find(ib.begin(), ib.end(), Site{1, 1}) != ib.end());
    for (const Site& s : ib) {
        bool outside_neighbor = false;
        for (const Site& nb : neighbors(s))
            if (norm_sq(nb) > 4) outside_neighbor = true;
        CHECK(outside_neighbor);
    }
}

TEST_CASE("shells partition the annuli")
{
    CHECK(shell(1).sites.size() == 4);
    CHECK(shell(2).sites.size() == 8);
    for (const Site& s : shell(3).sites) {
        CHECK(norm(s) <= 3.0);
        CHECK(norm(s) > 2.0);
        CHECK(shell_index(s) == 3);
    }
    CHECK(shell_index({1, 1}) == 2);
    CHECK(shell_index({3, 4}) == 5);
    CHECK(shell_index({1, 0}) == 1);
}

TEST_CASE("disk membership is inclusive on the boundary")
{
    const Disk d{{0, 0}, 5.0};
    CHECK(d.contains({5, 0}));
    CHECK(d.contains({3, 4}));
    CHECK(!d.contains({5, 1}));
}

TEST_CASE("torus wrap")
{
    const TorusSpec t{10};
    CHECK(t.wrap({-1, 0}) == Site{9, 0});
    CHECK(t.wrap({10, -11}) == Site{0, 9});
    CHECK(t.wrap({3, 4}) == Site{3, 4});
}

TEST_CASE("torus embedding rejects disks that wrap onto themselves")
{
    const TorusSpec t{20};
    CHECK_NOTHROW(torus_embed_offset({{0, 0}, 9.0}, t));
    CHECK_THROWS(torus_embed_offset({{0, 0}, 10.0}, t));
}
