#include "ri2d/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ri2d {

Interval wilson_ci(std::uint64_t successes, std::uint64_t n, double z)
{
    if (n == 0) throw std::invalid_argument("wilson_ci: n = 0");
    if (successes > n) throw std::invalid_argument("wilson_ci: successes > n");
    const double p = static_cast<double>(successes) / static_cast<double>(n);
    const double z2 = z * z;
    const double denom = 1.0 + z2 / static_cast<double>(n);
    const double center = (p + z2 / (2.0 * static_cast<double>(n))) / denom;
    const double half =
        z / denom *
        std::sqrt(p * (1.0 - p) / static_cast<double>(n) +
                  z2 / (4.0 * static_cast<double>(n) * static_cast<double>(n)));
    // at p = 0 (resp. p = 1) center and half agree mathematically; avoid the
    // cancellation residual and return the exact endpoint
    const double lo = successes == 0 ? 0.0 : std::max(0.0, center - half);
    const double hi = successes == n ? 1.0 : std::min(1.0, center + half);
    return {lo, hi};
}

double normal_cdf(double x)
{
    return 0.5 * std::erfc(-x / 1.4142135623730951);
}

namespace {

// series expansion of P(a,x), good for x < a + 1
double gamma_p_series(double a, double x)
{
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Lentz continued fraction for Q(a,x), good for x >= a + 1
double gamma_q_cf(double a, double x)
{
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

} // namespace

double gamma_p(double a, double x)
{
    if (!(a > 0.0) || x < 0.0) throw std::invalid_argument("gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x)
{
    if (!(a > 0.0) || x < 0.0) throw std::invalid_argument("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    return x < a + 1.0 ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

double chi_square_stat(const std::vector<std::uint64_t>& counts,
                       const std::vector<double>& expected)
{
    if (counts.size() != expected.size() || counts.empty())
        throw std::invalid_argument("chi_square_stat: size mismatch");
    double stat = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (!(expected[i] > 0.0))
            throw std::invalid_argument("chi_square_stat: expected count must be positive");
        const double d = static_cast<double>(counts[i]) - expected[i];
        stat += d * d / expected[i];
    }
    return stat;
}

double chi_square_pvalue(double stat, int dof)
{
    if (dof <= 0) throw std::invalid_argument("chi_square_pvalue: dof must be positive");
    return gamma_q(0.5 * dof, 0.5 * stat);
}

double ks_distance(std::vector<double> samples,
                   const std::function<double(double)>& cdf)
{
    if (samples.empty()) throw std::invalid_argument("ks_distance: no samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, f - static_cast<double>(i) / n);
        d = std::max(d, static_cast<double>(i + 1) / n - f);
    }
    return d;
}

double sample_N(double log_s, RngStream& rng)
{
    if (!(log_s > 0.0)) throw std::invalid_argument("sample_N: need log s > 0");
    const std::uint64_t m = rng.poisson(2.0 * log_s);
    double n = 0.0;
    for (std::uint64_t i = 0; i < m; ++i) n += log_s * rng.exponential();
    return n;
}

double downward_threshold(double log_s)
{
    return 2.0 * log_s * log_s - std::pow(log_s, 1.5);
}

} // namespace ri2d
