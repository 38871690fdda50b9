#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ri2d/rng.hpp"

namespace ri2d {

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
};

/// Wilson score interval for a binomial proportion; z is the two-sided
/// normal quantile (2.5758 for 99%).
Interval wilson_ci(std::uint64_t successes, std::uint64_t n, double z);

double normal_cdf(double x);

/// Regularized incomplete gamma functions P(a,x) and Q(a,x) = 1 - P(a,x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

/// Pearson statistic sum (o - e)^2 / e; expected counts must be positive.
double chi_square_stat(const std::vector<std::uint64_t>& counts,
                       const std::vector<double>& expected);

/// Upper-tail p-value of the chi-square distribution with `dof` degrees.
double chi_square_pvalue(double stat, int dof);

/// One-sample Kolmogorov-Smirnov distance against a cdf (samples are copied
/// and sorted internally).
double ks_distance(std::vector<double> samples,
                   const std::function<double(double)>& cdf);

/// Compound-Poisson excursion count up to a mesoscopic scale: a
/// Poisson(2 ln s) number of independent Exp(mean ln s) summands.
double sample_N(double log_s, RngStream& rng);

/// Centering threshold 2 ln^2 s - ln^{3/2} s for the downward deviation.
double downward_threshold(double log_s);

} // namespace ri2d
