#include "ri2d/couplings.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ri2d/excursions.hpp"
#include "ri2d/walks.hpp"

namespace ri2d {

namespace {

constexpr double kPi = 3.141592653589793238;

double poisson_pmf(double lambda, std::uint64_t k)
{
    if (lambda <= 0.0) return k == 0 ? 1.0 : 0.0;
    const double kk = static_cast<double>(k);
    return std::exp(kk * std::log(lambda) - lambda - std::lgamma(kk + 1.0));
}

std::uint64_t pmf_support_bound(double lambda)
{
    return static_cast<std::uint64_t>(lambda + 12.0 * std::sqrt(lambda) + 40.0);
}

} // namespace

TvBound poisson_intensity_tv(double lambda, double h)
{
    if (!(lambda > 0.0) || !(h >= 0.0))
        throw std::invalid_argument("poisson_intensity_tv: bad arguments");
    const std::uint64_t kmax = pmf_support_bound(lambda + h);
    double tv = 0.0;
    for (std::uint64_t k = 0; k <= kmax; ++k)
        tv += std::abs(poisson_pmf(lambda + h, k) - poisson_pmf(lambda, k));
    return {0.5 * tv, 0.5 * std::sqrt(std::expm1(h * h / lambda))};
}

TvBound poisson_shift_tv(double lambda)
{
    if (!(lambda > 0.0))
        throw std::invalid_argument("poisson_shift_tv: bad arguments");
    const std::uint64_t kmax = pmf_support_bound(lambda);
    double cost = 0.0;
    for (std::uint64_t k = 0; k <= kmax; ++k)
        cost += poisson_pmf(lambda, k) *
                std::abs(static_cast<double>(k) / lambda - 1.0);
    return {0.5 * cost, 0.5 / std::sqrt(lambda)};
}

double poisson_pair_tv(double lambda_i, double lambda_j, std::uint64_t shift)
{
    const std::uint64_t kmax =
        std::max(pmf_support_bound(lambda_i), shift + pmf_support_bound(lambda_j));
    double tv = 0.0;
    for (std::uint64_t k = 0; k <= kmax; ++k) {
        const double q = k >= shift ? poisson_pmf(lambda_j, k - shift) : 0.0;
        tv += std::abs(poisson_pmf(lambda_i, k) - q);
    }
    return 0.5 * tv;
}

namespace {

std::uint64_t sample_count_residual(double lambda_i, double lambda_j,
                                    std::uint64_t shift, RngStream& rng)
{
    const std::uint64_t kmax =
        std::max(pmf_support_bound(lambda_i), shift + pmf_support_bound(lambda_j));
    double total = 0.0;
    for (std::uint64_t k = 0; k <= kmax; ++k) {
        const double q = k >= shift ? poisson_pmf(lambda_j, k - shift) : 0.0;
        total += std::max(poisson_pmf(lambda_i, k) - q, 0.0);
    }
    double u = rng.uniform() * total;
    std::uint64_t last = 0;
    for (std::uint64_t k = 0; k <= kmax; ++k) {
        const double q = k >= shift ? poisson_pmf(lambda_j, k - shift) : 0.0;
        const double r = std::max(poisson_pmf(lambda_i, k) - q, 0.0);
        if (r > 0.0) last = k;
        u -= r;
        if (u < 0.0) return k;
    }
    return last;
}

} // namespace

CountCouplingResult count_coupling(double lambda_i, double lambda_j,
                                   std::uint64_t shift, RngStream& rng)
{
    CountCouplingResult res;
    const std::uint64_t small = lambda_j > 0.0 ? rng.poisson(lambda_j) : 0;
    res.n_j = shift + small;
    const double q = poisson_pmf(lambda_j, small);
    const double p = poisson_pmf(lambda_i, res.n_j);
    if (q > 0.0 && rng.uniform() * q < std::min(p, q)) {
        res.n_i = res.n_j;
        res.matched = true;
    } else {
        res.n_i = sample_count_residual(lambda_i, lambda_j, shift, rng);
        res.matched = false;
    }
    return res;
}

MarkCouplingResult mark_coupling_diag(Site start, double outer_radius,
                                      const PotentialTable& table, RngStream& rng)
{
    if (start == Site{0, 0})
        throw std::invalid_argument("mark_coupling_diag: cannot start at the origin");
    const double r2 = outer_radius * outer_radius;
    auto outside = [r2](const Site& s) {
        return static_cast<double>(norm_sq(s)) > r2;
    };

    MarkCouplingResult res;
    Site x = start; // plain SRW
    Site y = start; // a-tilted walk
    bool together = true;
    constexpr std::uint64_t budget = 1'000'000'000ULL;
    for (std::uint64_t step = 0; step < budget; ++step) {
        if (outside(x) && outside(y)) break;
        if (together) {
            const auto nbs = neighbors(x);
            const auto p = conditioned_step_distribution(x, table);
            double m[4];
            double omega = 0.0;
            for (int k = 0; k < 4; ++k) {
                m[k] = std::min(0.25, p[k]);
                omega += m[k];
            }
            double u = rng.uniform();
            if (u < omega) {
                int pick = 3;
                for (int k = 0; k < 4; ++k) {
                    u -= m[k];
                    if (u < 0) { pick = k; break; }
                }
                x = nbs[pick];
                y = x;
            } else {
                const double rem = 1.0 - omega;
                double ux = rng.uniform() * rem;
                int kx = 3;
                for (int k = 0; k < 4; ++k) {
                    ux -= 0.25 - m[k];
                    if (ux < 0) { kx = k; break; }
                }
                double uy = rng.uniform() * rem;
                int ky = 3;
                for (int k = 0; k < 4; ++k) {
                    uy -= p[k] - m[k];
                    if (uy < 0) { ky = k; break; }
                }
                x = nbs[kx];
                y = nbs[ky];
                together = false;
            }
        } else {
            if (!outside(x)) x = neighbors(x)[rng.next_u64() & 3];
            if (!outside(y)) y = conditioned_step(y, table, rng);
        }
        ++res.steps;
    }
    res.identical = together;
    res.exit_plain = x;
    res.exit_tilted = y;
    return res;
}

// --- entrance laws ----------------------------------------------------------

namespace {

std::vector<Site> shell_domain(int n, const SiteSet& removed)
{
    const std::int64_t limit2 =
        static_cast<std::int64_t>(n - 1) * static_cast<std::int64_t>(n - 1);
    std::vector<Site> domain;
    for (std::int64_t yy = -(n - 1); yy <= n - 1; ++yy) {
        for (std::int64_t xx = -(n - 1); xx <= n - 1; ++xx) {
            const Site s{xx, yy};
            if (s == Site{0, 0} || norm_sq(s) > limit2 || removed.contains(s))
                continue;
            domain.push_back(s);
        }
    }
    return domain;
}

} // namespace

EntranceLawSolver::EntranceLawSolver(int n, const SiteSet& removed,
                                     const PotentialTable& table)
    : n_(n), table_(table), solver_(shell_domain(n, removed))
{
    shell_ = shell(n).sites;
    std::sort(shell_.begin(), shell_.end());
    for (std::size_t i = 0; i < shell_.size(); ++i) shell_index_[shell_[i]] = i;
}

std::size_t EntranceLawSolver::index_of_shell_site(const Site& w) const
{
    const auto it = shell_index_.find(w);
    if (it == shell_index_.end())
        throw std::invalid_argument("EntranceLawSolver: site not on the shell");
    return it->second;
}

std::vector<double> EntranceLawSolver::compute(const Site& y, bool boundary_start) const
{
    std::vector<double> b(solver_.size(), 0.0);
    if (boundary_start) {
        if (solver_.index_of(y) >= 0)
            throw std::invalid_argument("EntranceLawSolver: start not on the removed set");
        for (const Site& z : neighbors(y)) {
            const std::int64_t idx = solver_.index_of(z);
            if (idx >= 0) b[static_cast<std::size_t>(idx)] += 1.0;
        }
    } else {
        const std::int64_t idx = solver_.index_of(y);
        if (idx < 0)
            throw std::invalid_argument("EntranceLawSolver: start not in the domain");
        b[static_cast<std::size_t>(idx)] = 1.0;
    }

    // adjoint identity (the restricted operator is symmetric): the mass the
    // walk from y deposits at shell site w is a(w) [ (1/4) sum of the Green
    // values at w's interior neighbors + the direct one-step term ]
    const std::vector<double> v = solver_.solve_rhs(b, 1e-12);
    std::vector<double> law(shell_.size(), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < shell_.size(); ++i) {
        const Site& w = shell_[i];
        double s = 0.0;
        bool direct = false;
        for (const Site& z : neighbors(w)) {
            const std::int64_t idx = solver_.index_of(z);
            if (idx >= 0) s += 0.25 * v[static_cast<std::size_t>(idx)];
            if (boundary_start && z == y) direct = true;
        }
        if (direct) s += 1.0;
        law[i] = std::max(0.0, table_.at(w) * s);
        total += law[i];
    }
    if (!(total > 0.0))
        throw std::runtime_error("EntranceLawSolver: degenerate law");
    for (double& p : law) p /= total;
    return law;
}

const std::vector<double>& EntranceLawSolver::law_from_interior(const Site& y)
{
    auto it = cache_interior_.find(y);
    if (it == cache_interior_.end())
        it = cache_interior_.emplace(y, compute(y, false)).first;
    return it->second;
}

const std::vector<double>& EntranceLawSolver::law_from_removed(const Site& y)
{
    auto it = cache_removed_.find(y);
    if (it == cache_removed_.end())
        it = cache_removed_.emplace(y, compute(y, true)).first;
    return it->second;
}

// --- thresholds -------------------------------------------------------------

namespace {

struct InnerLeg {
    Site entry;
    PathSegment fwd;
    PathSegment bwd;
};

double k_reach(const PathSegment& fwd, const SiteSet& K_set)
{
    std::size_t last = 0;
    for (std::size_t k = 0; k < fwd.sites.size(); ++k)
        if (K_set.contains(fwd.sites[k])) last = k;
    double d = 0.0;
    for (std::size_t k = 0; k <= last && k < fwd.sites.size(); ++k)
        d = std::max(d, norm(fwd.sites[k]));
    return d;
}

std::uint64_t quantile_index(std::size_t n, double level)
{
    const double pos = level * static_cast<double>(n);
    const auto idx = static_cast<std::size_t>(std::ceil(pos));
    return idx == 0 ? 0 : std::min(idx - 1, n - 1);
}

} // namespace

Thresholds choose_thresholds(const std::vector<Site>& K, double alpha, int n,
                             double eps, std::uint64_t pilot,
                             const PotentialTable& table, RngStream& rng)
{
    if (pilot < 16) throw std::invalid_argument("choose_thresholds: pilot too small");
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("choose_thresholds: eps must be in (0,1)");

    std::vector<Site> rooted = K;
    if (std::none_of(rooted.begin(), rooted.end(),
                     [](const Site& s) { return s == Site{0, 0}; }))
        rooted.push_back({0, 0});
    const double lambda_k = kPi * alpha * capacity(rooted, table).value;
    const HarmonicMeasure hm_k = bundle_entry_measure(K, table);
    SiteSet K_set;
    for (const Site& s : K)
        if (s != Site{0, 0}) K_set.insert(s);
    const std::int64_t limit2 =
        static_cast<std::int64_t>(n - 1) * static_cast<std::int64_t>(n - 1);
    auto stop = [limit2](const Site& s) { return norm_sq(s) > limit2; };

    auto sample_pair = [&](std::uint64_t& xi, double& d) {
        xi = rng.poisson(lambda_k);
        d = 0.0;
        for (std::uint64_t i = 0; i < xi; ++i) {
            const Site y = sample_site(hm_k, rng);
            const PathSegment fwd = conditioned_path(y, stop, table, rng);
            d = std::max(d, k_reach(fwd, K_set));
        }
    };

    std::vector<std::uint64_t> xis(pilot);
    std::vector<double> reaches(pilot);
    for (std::uint64_t i = 0; i < pilot; ++i) sample_pair(xis[i], reaches[i]);
    std::sort(xis.begin(), xis.end());
    std::sort(reaches.begin(), reaches.end());

    Thresholds thr;
    const double level = 1.0 - eps / 2.0;
    thr.m0 = xis[quantile_index(pilot, level)];
    thr.gamma0 = reaches[quantile_index(pilot, level)];

    std::uint64_t inside = 0;
    for (std::uint64_t i = 0; i < pilot; ++i) {
        std::uint64_t xi;
        double d;
        sample_pair(xi, d);
        if (xi <= thr.m0 && d <= thr.gamma0) ++inside;
    }
    thr.pilot_coverage = static_cast<double>(inside) / static_cast<double>(pilot);
    return thr;
}

// --- the four-stage pipeline -------------------------------------------------

PipelineContext::PipelineContext(int n, std::vector<Site> K, double alpha,
                                 const PotentialTable& table)
    : n_(n), K_(std::move(K)), alpha_(alpha), table_(table),
      r_(std::max(2.0, std::log(static_cast<double>(n)))),
      K_set_(), ball_r_set_(), host_(),
      hm_K_(bundle_entry_measure(K_, table)),
      hm_ball_(bundle_entry_measure(ball_sites({{0, 0}, std::max(2.0, std::log(static_cast<double>(n)))}), table)),
      law_plain_(n, SiteSet{}, table),
      law_avoid_k_(n, [&] {
          SiteSet s;
          for (const Site& x : K_)
              if (x != Site{0, 0}) s.insert(x);
          return s;
      }(), table),
      law_escape_(n, [&] {
          SiteSet s;
          for (const Site& x : ball_sites({{0, 0}, std::max(2.0, std::log(static_cast<double>(n)))}))
              if (x != Site{0, 0}) s.insert(x);
          return s;
      }(), table)
{
    if (n_ < 8) throw std::invalid_argument("PipelineContext: need n >= 8");
    const Disk inner_disk{{0, 0}, r_};
    for (const Site& s : K_) {
        if (!inner_disk.contains(s))
            throw std::invalid_argument("PipelineContext: K must sit inside B(ln n)");
        if (s != Site{0, 0}) K_set_.insert(s);
    }
    if (K_set_.empty())
        throw std::invalid_argument("PipelineContext: K \\ {0} must be nonempty");
    for (const Site& s : ball_sites(inner_disk))
        if (s != Site{0, 0}) ball_r_set_.insert(s);

    std::vector<Site> rooted = K_;
    if (std::none_of(rooted.begin(), rooted.end(),
                     [](const Site& s) { return s == Site{0, 0}; }))
        rooted.push_back({0, 0});
    const double cap_ball = capacity(ball_sites(inner_disk), table_).value;
    const double cap_k = capacity(rooted, table_).value;
    lambda_i_ = kPi * alpha_ * cap_ball;
    lambda_k_ = kPi * alpha_ * cap_k;
    lambda_j_ = std::max(0.0, lambda_i_ - lambda_k_);

    kill_radius_ = 4.0 * n_;
    zones_.push_back(Disk{{0, 0}, static_cast<double>(n_) + 5.0});

    const std::int64_t in2 = static_cast<std::int64_t>(n_) * n_;
    const std::int64_t out2 =
        static_cast<std::int64_t>(n_ + 4) * static_cast<std::int64_t>(n_ + 4);
    for (std::int64_t yy = -(n_ + 4); yy <= n_ + 4; ++yy)
        for (std::int64_t xx = -(n_ + 4); xx <= n_ + 4; ++xx)
            if (const Site s{xx, yy}; norm_sq(s) > in2 && norm_sq(s) <= out2)
                host_.insert(s);
}

namespace {

/// Given an observation j of law q, draw from p so that the pair is a
/// maximal coupling of (p, q): agreement probability is exactly 1 - TV.
std::pair<std::size_t, bool> goldstein_pick(const std::vector<double>& p,
                                            const std::vector<double>& q,
                                            std::size_t j, RngStream& rng)
{
    const double overlap = std::min(p[j], q[j]);
    if (q[j] > 0.0 && rng.uniform() * q[j] < overlap) return {j, true};
    double tv = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) tv += std::max(p[i] - q[i], 0.0);
    if (!(tv > 0.0)) return {j, true};
    double u = rng.uniform() * tv;
    std::size_t last = j;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double r = std::max(p[i] - q[i], 0.0);
        if (r > 0.0) last = i;
        u -= r;
        if (u < 0.0) return {i, false};
    }
    return {last, false};
}

} // namespace

PipelineResult PipelineContext::run(const Thresholds& thresholds, RngStream& rng)
{
    PipelineResult res;
    const std::int64_t limit2 =
        static_cast<std::int64_t>(n_ - 1) * static_cast<std::int64_t>(n_ - 1);
    auto stop = [limit2](const Site& s) { return norm_sq(s) > limit2; };

    // stage 1: the trajectories through K, with their inner legs run up to
    // the shell
    res.xi_K = rng.poisson(lambda_k_);
    std::vector<InnerLeg> legs;
    legs.reserve(res.xi_K);
    for (std::uint64_t i = 0; i < res.xi_K; ++i) {
        InnerLeg leg;
        leg.entry = sample_site(hm_K_, rng);
        leg.fwd = conditioned_path(leg.entry, stop, table_, rng);
        leg.bwd = conditioned_path(leg.entry, stop, table_, rng,
                                   1'000'000'000ULL, &K_set_);
        res.d_K = std::max(res.d_K, k_reach(leg.fwd, K_set_));
        legs.push_back(std::move(leg));
    }
    if (res.xi_K > thresholds.m0 || res.d_K > thresholds.gamma0) {
        res.failed_at = PipelineStage::inner_event;
        return res;
    }

    // stage 2: maximal coupling of the trajectory counts
    const std::uint64_t small = lambda_j_ > 0.0 ? rng.poisson(lambda_j_) : 0;
    res.n_j = res.xi_K + small;
    {
        const double q = poisson_pmf(lambda_j_, small);
        const double p = poisson_pmf(lambda_i_, res.n_j);
        if (q > 0.0 && rng.uniform() * q < std::min(p, q)) {
            res.n_i = res.n_j;
        } else {
            res.n_i = sample_count_residual(lambda_i_, lambda_j_, res.xi_K, rng);
        }
    }
    if (res.n_i != res.n_j) {
        res.failed_at = PipelineStage::count;
        return res;
    }

    // remaining decomposed-side trajectories: hitters of B(ln n) whose inner
    // legs avoid K (joint rejection over entry and forward leg)
    for (std::uint64_t i = 0; i < small; ++i) {
        InnerLeg leg;
        for (std::uint64_t attempt = 0;; ++attempt) {
            if (attempt >= 1'000'000)
                throw std::runtime_error("pipeline: avoid-K rejection stuck");
            leg.entry = sample_site(hm_ball_, rng);
            leg.fwd = conditioned_path(leg.entry, stop, table_, rng);
            if (std::none_of(leg.fwd.sites.begin(), leg.fwd.sites.end(),
                             [&](const Site& s) { return K_set_.contains(s); }))
                break;
        }
        leg.bwd = conditioned_path(leg.entry, stop, table_, rng,
                                   1'000'000'000ULL, &ball_r_set_);
        legs.push_back(std::move(leg));
    }

    // stage 3: couple the shell entrance points of every strand pair
    const std::vector<Site>& support = law_plain_.support();
    struct StrandPair {
        std::size_t fwd_idx;
        std::size_t bwd_idx;
    };
    std::vector<StrandPair> pairs(legs.size());
    bool entries_matched = true;
    for (std::size_t k = 0; k < legs.size(); ++k) {
        const Site y_i = sample_site(hm_ball_, rng);
        const bool through_k = k < res.xi_K;
        const auto& p_fwd = law_plain_.law_from_interior(y_i);
        const auto& p_bwd = law_escape_.law_from_removed(y_i);
        const auto& q_fwd = through_k
                                ? law_plain_.law_from_interior(legs[k].entry)
                                : law_avoid_k_.law_from_interior(legs[k].entry);
        const auto& q_bwd = through_k
                                ? law_avoid_k_.law_from_removed(legs[k].entry)
                                : law_escape_.law_from_removed(legs[k].entry);

        const std::size_t jf =
            law_plain_.index_of_shell_site(legs[k].fwd.sites.back());
        const std::size_t jb =
            law_plain_.index_of_shell_site(legs[k].bwd.sites.back());
        const auto [pf, okf] = goldstein_pick(p_fwd, q_fwd, jf, rng);
        const auto [pb, okb] = goldstein_pick(p_bwd, q_bwd, jb, rng);
        pairs[k] = {pf, pb};
        entries_matched = entries_matched && okf && okb;
    }
    if (!entries_matched) {
        res.failed_at = PipelineStage::entry;
        return res;
    }

    // stage 4: one shared outward strand per coupled entrance point; the
    // reuse fails exactly when a shared strand returns to B(ln n)
    std::vector<CompressedPath> strands;
    strands.reserve(2 * pairs.size());
    for (const StrandPair& pr : pairs) {
        for (const std::size_t idx : {pr.fwd_idx, pr.bwd_idx}) {
            CompressedWalk w = conditioned_walk_far(support[idx], kill_radius_,
                                                    table_, rng, zones_,
                                                    &ball_r_set_);
            if (w.outcome == WalkOutcome::truncated)
                throw TruncationError("pipeline: shared strand truncated",
                                      PathSegment{w.path.sites, 0});
            if (w.outcome == WalkOutcome::hit_taboo) {
                res.failed_at = PipelineStage::reuse;
                return res;
            }
            strands.push_back(std::move(w.path));
        }
    }

    // both sides assemble their configuration on the comparison annulus
    // independently (different bookkeeping order) from the shared strands
    std::vector<CompressedPath> side_j = strands;
    std::vector<CompressedPath> side_i;
    side_i.reserve(strands.size());
    for (std::size_t k = strands.size(); k-- > 0;) side_i.push_back(strands[k]);

    res.config_j = noodle_config(side_j, host_);
    res.config_i = noodle_config(side_i, host_);
    res.configs_equal =
        res.config_i.same_noodles(res.config_j) &&
        res.config_i.canonical_bytes() == res.config_j.canonical_bytes();
    return res;
}

} // namespace ri2d
