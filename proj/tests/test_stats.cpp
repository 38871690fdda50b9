#include "doctest.h"

#include <cmath>

#include "ri2d/stats.hpp"

using namespace ri2d;

TEST_CASE("wilson interval reference values")
{
    const Interval a = wilson_ci(50, 100, 1.96);
    CHECK(std::abs(a.lo - 0.40382982859014716) < 1e-12);
    CHECK(std::abs(a.hi - 0.5961701714098528) < 1e-12);
    const Interval b = wilson_ci(10, 50, 2.5758293035489004);
    CHECK(std::abs(b.lo - 0.09379659211616062) < 1e-12);
    CHECK(std::abs(b.hi - 0.37649466291441613) < 1e-12);
    const Interval edge = wilson_ci(0, 20, 2.5758293035489004);
    CHECK(edge.lo == 0.0);
    CHECK(edge.hi > 0.0);
}

TEST_CASE("normal cdf")
{
    CHECK(normal_cdf(0.0) == 0.5);
    CHECK(std::abs(normal_cdf(-0.5) - 0.3085375387259869) < 1e-12);
    CHECK(std::abs(normal_cdf(1.0) + normal_cdf(-1.0) - 1.0) < 1e-14);
}

TEST_CASE("incomplete gamma and chi-square tails")
{
    CHECK(std::abs(gamma_q(1.5, 2.0) - 0.2614641299491106) < 1e-10);
    CHECK(std::abs(gamma_p(1.5, 2.0) + gamma_q(1.5, 2.0) - 1.0) < 1e-12);
    // dof = 2 has the closed form exp(-x/2)
    CHECK(std::abs(chi_square_pvalue(5.99, 2) - std::exp(-5.99 / 2.0)) < 1e-10);
    CHECK(std::abs(chi_square_pvalue(3.84, 1) - 0.05004352124870515) < 1e-8);
}

TEST_CASE("pearson statistic")
{
    const double s = chi_square_stat({10, 20, 30}, {15.0, 15.0, 30.0});
    CHECK(std::abs(s - (25.0 / 15.0 + 25.0 / 15.0)) < 1e-12);
    CHECK_THROWS(chi_square_stat({1}, {0.0}));
}

TEST_CASE("ks distance")
{
    // perfect uniform grid has distance 1/(2n) against U(0,1)
    std::vector<double> grid;
    const int n = 100;
    for (int i = 0; i < n; ++i) grid.push_back((i + 0.5) / n);
    const auto unif = [](double x) { return x < 0 ? 0.0 : (x > 1 ? 1.0 : x); };
    CHECK(std::abs(ks_distance(grid, unif) - 0.005) < 1e-12);
    // grossly wrong cdf
    CHECK(ks_distance(grid, [](double) { return 0.0; }) > 0.9);
}

TEST_CASE("compound count mean and threshold")
{
    const double ls = 30.0;
    CHECK(std::abs(downward_threshold(ls) -
                   (2.0 * ls * ls - std::pow(ls, 1.5))) < 1e-12);
    RngStream rng(9, 0);
    const int n = 4000;
    double s = 0;
    for (int i = 0; i < n; ++i) s += sample_N(ls, rng);
    const double mean = s / n;
    // mean 2 ls^2, sd 2 ls^{3/2} per draw
    CHECK(std::abs(mean - 2.0 * ls * ls) <
          4.0 * 2.0 * std::pow(ls, 1.5) / std::sqrt(double(n)));
}
