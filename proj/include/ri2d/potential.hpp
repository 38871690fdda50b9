#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ri2d/lattice.hpp"

namespace ri2d {

/// Potential kernel a(.) of the planar SRW, tabulated on B(R) and extended
/// by the asymptotic expansion (2/pi) ln|x| + kappa outside the table.
/// a(0) = 0, a is discretely harmonic off the origin and the neighbor
/// average at the origin equals 1.
class PotentialTable {
public:
    PotentialTable() = default;
    PotentialTable(int R, double kappa, std::vector<double> values);

    int R() const { return R_; }
    double kappa() const { return kappa_; }

    double at(const Site& s) const
    {
        const std::int64_t d2 = norm_sq(s);
        if (d2 <= table_limit_sq_) {
            return values_[static_cast<std::size_t>((s.y + R_) * (2 * R_ + 1) + (s.x + R_))];
        }
        return 0.3183098861837907 * std::log(static_cast<double>(d2)) + kappa_;
    }

    /// Max over 0 < |x| < r of |neighbor average - a(x)|.
    double harmonicity_residual(int r) const;

    void save(const std::string& path) const;
    static PotentialTable load(const std::string& path);

private:
    int R_ = 0;
    std::int64_t table_limit_sq_ = -1;
    double kappa_ = 0.0;
    std::vector<double> values_; // flat (2R+1)^2, row-major in y
};

/// Solve the discrete Poisson problem for a(.) on B(R) with asymptotic
/// boundary values; kappa is calibrated so that a(1,0) = 1. If cache_dir is
/// given, the table is persisted and reloaded bit-identically.
PotentialTable potential_kernel(int R, double rel_tol = 1e-13,
                                const std::optional<std::string>& cache_dir = std::nullopt);

/// Hitting distribution supported on the inner boundary of a set.
struct HarmonicMeasure {
    std::vector<Site> support;
    std::vector<double> weights;

    double weight_of(const Site& s) const;
};

/// Conditional harmonic measure hm_A^{A'} per the escape-probability
/// definition: weights proportional to P_y[tau_1(boundary of A') < tau_1(A)]
/// for y on the inner boundary of A. With `conditioned` set the SRW steps
/// are replaced by the Doob transform by a (the walk avoiding the origin);
/// the solve is reduced to a plain SRW solve for g = a * f.
HarmonicMeasure conditional_harmonic_measure(const std::vector<Site>& A,
                                             const Disk& Aprime,
                                             bool conditioned = false,
                                             const PotentialTable* table = nullptr,
                                             double rel_tol = 1e-12);

/// hm_A approximated by the far-container conditional measure; the bias is
/// O(1/R_far). Requires R_far >= 4 * (max |x| over A + 1).
HarmonicMeasure harmonic_measure(const std::vector<Site>& A, int R_far,
                                 double rel_tol = 1e-12);

/// hm_A "from infinity" via the potential-kernel equilibrium system
/// Q nu = 1 with Q_{xy} = a(x - y); exact up to the accuracy of a.
/// Works for any finite A (the support is trimmed to the inner boundary
/// plus the origin when A contains it).
HarmonicMeasure equilibrium_harmonic_measure(const std::vector<Site>& A,
                                             const PotentialTable& table);

struct Capacity {
    double value = 0.0;
};

/// Two-dimensional capacity rooted at the origin:
/// cap(A) = sum_y hm_A(y) a(y), for finite A containing 0.
Capacity capacity(const std::vector<Site>& A, const PotentialTable& table);

} // namespace ri2d
