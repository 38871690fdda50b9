#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "ri2d/interlacements.hpp"
#include "ri2d/potential.hpp"
#include "ri2d/rng.hpp"
#include "ri2d/solver.hpp"

namespace ri2d {

struct TvBound {
    double exact = 0.0;
    double bound = 0.0;
};

/// Exact TV(Poisson(lambda + h), Poisson(lambda)) against the analytic
/// bound (1/2) sqrt(exp(h^2 / lambda) - 1).
TvBound poisson_intensity_tv(double lambda, double h);

/// Exact (1/2) E|X / lambda - 1| for X ~ Poisson(lambda) -- the cost of
/// rescaling a Poisson process onto a shifted interval of the same rate --
/// against the bound 1 / (2 sqrt(lambda)).
TvBound poisson_shift_tv(double lambda);

/// Exact TV between Poisson(lambda_i) and shift + Poisson(lambda_j).
double poisson_pair_tv(double lambda_i, double lambda_j, std::uint64_t shift);

struct CountCouplingResult {
    std::uint64_t n_i = 0;
    std::uint64_t n_j = 0; // total on the shifted side, including the shift
    bool matched = false;
};

/// Maximal coupling of N_I ~ Poisson(lambda_i) with shift + Poisson(lambda_j):
/// the shifted side is sampled directly and N_I is drawn from the Goldstein
/// kernel, so P[matched] = 1 - poisson_pair_tv(...) exactly.
CountCouplingResult count_coupling(double lambda_i, double lambda_j,
                                   std::uint64_t shift, RngStream& rng);

struct MarkCouplingResult {
    bool identical = false; // the two paths agree up to the common exit
    std::uint64_t steps = 0;
    Site exit_plain;
    Site exit_tilted;
};

/// Stepwise maximal coupling of the SRW and the a-tilted walk from the same
/// start, run until both leave B(0, outer_radius).
MarkCouplingResult mark_coupling_diag(Site start, double outer_radius,
                                      const PotentialTable& table, RngStream& rng);

/// First-passage laws onto the shell Lambda_n = { n-1 < |x| <= n } for the
/// a-tilted walk on B(0, n-1) \ ({0} u removed), computed by one adjoint
/// Dirichlet solve per starting point and cached.
class EntranceLawSolver {
public:
    EntranceLawSolver(int n, const SiteSet& removed, const PotentialTable& table);

    const std::vector<Site>& support() const { return shell_; }

    /// Law for a walk started inside the domain.
    const std::vector<double>& law_from_interior(const Site& y);

    /// Law for a walk started on the removed set and conditioned to reach
    /// the shell before re-entering it (normalized escape law).
    const std::vector<double>& law_from_removed(const Site& y);

    std::size_t index_of_shell_site(const Site& w) const;

private:
    std::vector<double> compute(const Site& y, bool boundary_start) const;

    int n_;
    const PotentialTable& table_;
    DirichletSolver solver_;
    std::vector<Site> shell_;
    std::unordered_map<Site, std::size_t, SiteHash> shell_index_;
    std::unordered_map<Site, std::vector<double>, SiteHash> cache_interior_;
    std::unordered_map<Site, std::vector<double>, SiteHash> cache_removed_;
};

struct Thresholds {
    std::uint64_t m0 = 0;   // count threshold for xi_K
    double gamma0 = 0.0;    // reach threshold for D_K
    double pilot_coverage = 0.0; // held-out frequency of the inner event
};

/// Pilot (1 - eps/2)-quantiles of (xi_K, D_K) with a held-out validation
/// pass of the same size.
Thresholds choose_thresholds(const std::vector<Site>& K, double alpha, int n,
                             double eps, std::uint64_t pilot,
                             const PotentialTable& table, RngStream& rng);

enum class PipelineStage { success, inner_event, count, entry, reuse };

struct PipelineResult {
    PipelineStage failed_at = PipelineStage::success;
    std::uint64_t xi_K = 0;
    std::uint64_t n_i = 0; // plain-side trajectory count
    std::uint64_t n_j = 0; // decomposed-side trajectory count (incl. xi_K)
    double d_K = 0.0;
    NoodleConfig config_i;
    NoodleConfig config_j;
    bool configs_equal = false;
};

/// Shared per-(n, K, alpha) state of the four-stage coupling: capacities,
/// entry measures and the three cached entrance-law solvers.
class PipelineContext {
public:
    PipelineContext(int n, std::vector<Site> K, double alpha,
                    const PotentialTable& table);

    int n() const { return n_; }
    double lambda_i() const { return lambda_i_; }
    double lambda_k() const { return lambda_k_; }
    double lambda_j() const { return lambda_j_; }

    /// One replica of the four-stage coupling between the trajectories of
    /// RI(alpha) hitting B(ln n) and their decomposition through K; on
    /// success both sides assemble the configuration on the comparison
    /// annulus [n+1, n+4] from the shared strands and are compared byte
    /// for byte.
    PipelineResult run(const Thresholds& thresholds, RngStream& rng);

private:
    int n_;
    std::vector<Site> K_;
    double alpha_;
    const PotentialTable& table_;
    double r_;
    double lambda_i_ = 0, lambda_k_ = 0, lambda_j_ = 0;
    double kill_radius_ = 0;
    SiteSet K_set_;      // K \ {0}
    SiteSet ball_r_set_; // B(0, r) \ {0}
    SiteSet host_;       // comparison annulus
    std::vector<Disk> zones_;
    HarmonicMeasure hm_K_;
    HarmonicMeasure hm_ball_;
    EntranceLawSolver law_plain_;   // absorbed at {0} only
    EntranceLawSolver law_avoid_k_; // additionally absorbed on K
    EntranceLawSolver law_escape_;  // additionally absorbed on B(r)
};

} // namespace ri2d
