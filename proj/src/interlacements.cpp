#include "ri2d/interlacements.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "ri2d/excursions.hpp"

namespace ri2d {

namespace {

constexpr double kPi = 3.141592653589793238;

std::vector<Site> drop_origin(const std::vector<Site>& K)
{
    std::vector<Site> out;
    out.reserve(K.size());
    for (const Site& s : K)
        if (!(s.x == 0 && s.y == 0)) out.push_back(s);
    return out;
}

Site centroid(const std::vector<Site>& sites)
{
    std::int64_t sx = 0, sy = 0;
    for (const Site& s : sites) { sx += s.x; sy += s.y; }
    const auto n = static_cast<std::int64_t>(sites.size());
    return {(sx + (sx >= 0 ? n / 2 : -(n / 2))) / n,
            (sy + (sy >= 0 ? n / 2 : -(n / 2))) / n};
}

double radius_about(const std::vector<Site>& sites, const Site& c)
{
    double r = 0.0;
    for (const Site& s : sites) r = std::max(r, norm(s - c));
    return r;
}

/// Reverse `back` in time and append `fwd` (both start at the same site).
CompressedPath splice_two_sided(const CompressedPath& back, const CompressedPath& fwd)
{
    const std::size_t B = back.sites.size();
    CompressedPath out;
    out.sites.reserve(B + fwd.sites.size() - 1);
    out.sites.assign(back.sites.rbegin(), back.sites.rend());
    out.sites.insert(out.sites.end(), fwd.sites.begin() + 1, fwd.sites.end());
    for (std::uint32_t k : back.jump_breaks)
        out.jump_breaks.push_back(static_cast<std::uint32_t>(B - 2 - k));
    for (std::uint32_t k : fwd.jump_breaks)
        out.jump_breaks.push_back(static_cast<std::uint32_t>(B - 1 + k));
    std::sort(out.jump_breaks.begin(), out.jump_breaks.end());
    return out;
}

PathSegment as_segment(const CompressedPath& p)
{
    return PathSegment{p.sites, 0};
}

} // namespace

HarmonicMeasure bundle_entry_measure(const std::vector<Site>& K,
                                     const PotentialTable& table)
{
    const std::vector<Site> K_eff = drop_origin(K);
    if (K_eff.empty())
        throw std::invalid_argument("bundle_entry_measure: K \\ {0} is empty");
    const Site c = centroid(K_eff);
    const double rad = radius_about(K_eff, c);
    const double R_far = std::max(64.0, 8.0 * (rad + 1.0));
    return conditional_harmonic_measure(K_eff, Disk{c, R_far}, /*conditioned=*/true,
                                        &table);
}

HittingBundle sample_hitting_bundle(const std::vector<Site>& K, double alpha,
                                    double kill_radius,
                                    const PotentialTable& table, RngStream& rng)
{
    if (K.empty()) throw std::invalid_argument("sample_hitting_bundle: empty K");
    if (!(alpha >= 0.0))
        throw std::invalid_argument("sample_hitting_bundle: alpha must be >= 0");

    HittingBundle bundle;
    bundle.K = K;
    bundle.alpha = alpha;
    bundle.kill_radius = kill_radius;

    std::vector<Site> rooted = K;
    if (std::none_of(rooted.begin(), rooted.end(),
                     [](const Site& s) { return s.x == 0 && s.y == 0; }))
        rooted.push_back({0, 0});
    const double cap = capacity(rooted, table).value;
    bundle.xi_K = rng.poisson(kPi * alpha * cap);

    const std::vector<Site> K_eff = drop_origin(K);
    if (K_eff.empty()) {
        if (bundle.xi_K != 0)
            throw std::logic_error("sample_hitting_bundle: positive rate for K = {0}");
        return bundle;
    }
    const double reach = radius_about(K_eff, {0, 0});
    if (!(kill_radius > reach + 32.0))
        throw std::invalid_argument("sample_hitting_bundle: kill radius too small for K");

    const HarmonicMeasure entry = bundle_entry_measure(K, table);
    const Site c = centroid(K_eff);
    const Disk zone{c, radius_about(K_eff, c) + 2.0};
    const std::array<Disk, 1> zones{zone};
    SiteSet taboo(K_eff.begin(), K_eff.end());

    for (std::uint64_t i = 0; i < bundle.xi_K; ++i) {
        const Site y = sample_site(entry, rng);

        CompressedWalk fwd = conditioned_walk_far(y, kill_radius, table, rng, zones);
        if (fwd.outcome == WalkOutcome::truncated)
            throw TruncationError("sample_hitting_bundle: forward leg truncated",
                                  as_segment(fwd.path));

        // backward escape leg: conditioned never to re-enter K after leaving y
        CompressedWalk back;
        for (std::uint64_t attempt = 0;; ++attempt) {
            if (attempt >= 1'000'000)
                throw std::runtime_error("sample_hitting_bundle: escape leg rejection stuck");
            back = conditioned_walk_far(y, kill_radius, table, rng, zones, &taboo);
            if (back.outcome == WalkOutcome::truncated)
                throw TruncationError("sample_hitting_bundle: backward leg truncated",
                                      as_segment(back.path));
            if (back.outcome == WalkOutcome::killed) break;
        }

        CompressedPath traj = splice_two_sided(back.path, fwd.path);
        const std::size_t tau_minus = back.path.sites.size() - 1;
        std::size_t tau_plus = tau_minus;
        for (std::size_t k = tau_minus; k < traj.sites.size(); ++k)
            if (taboo.contains(traj.sites[k])) tau_plus = k;
        for (std::size_t k = tau_minus; k <= tau_plus; ++k)
            bundle.D_K = std::max(bundle.D_K, norm(traj.sites[k]));
        bundle.trajectories.push_back(std::move(traj));
        bundle.inner_span.emplace_back(tau_minus, tau_plus);
    }
    return bundle;
}

std::pair<std::vector<CompressedPath>, std::vector<CompressedPath>>
decompose(const std::vector<CompressedPath>& trajectories, const SiteSet& K)
{
    std::pair<std::vector<CompressedPath>, std::vector<CompressedPath>> parts;
    for (const CompressedPath& t : trajectories) {
        const bool hits = std::any_of(t.sites.begin(), t.sites.end(),
                                      [&](const Site& s) { return K.contains(s); });
        (hits ? parts.first : parts.second).push_back(t);
    }
    return parts;
}

NoodleConfig noodle_config(const std::vector<CompressedPath>& trajectories,
                           const SiteSet& A)
{
    NoodleConfig config;
    for (std::uint32_t id = 0; id < trajectories.size(); ++id) {
        const CompressedPath& t = trajectories[id];
        std::size_t j = 0;
        while (j < t.sites.size()) {
            if (!A.contains(t.sites[j])) { ++j; continue; }
            Noodle nd;
            nd.trajectory_id = id;
            nd.start = static_cast<std::uint32_t>(j);
            nd.sites.push_back(t.sites[j]);
            while (j + 1 < t.sites.size() && A.contains(t.sites[j + 1])) {
                if (t.is_jump_index(j))
                    throw std::logic_error(
                        "noodle_config: host set not unit-resolved in trajectory");
                nd.sites.push_back(t.sites[j + 1]);
                ++j;
            }
            config.noodles.push_back(std::move(nd));
            ++j;
        }
    }
    config.canonicalize();
    return config;
}

void NoodleConfig::canonicalize()
{
    std::sort(noodles.begin(), noodles.end(), [](const Noodle& a, const Noodle& b) {
        if (a.trajectory_id != b.trajectory_id) return a.trajectory_id < b.trajectory_id;
        return a.start < b.start;
    });
}

bool NoodleConfig::same_noodles(const NoodleConfig& other) const
{
    if (noodles.size() != other.noodles.size()) return false;
    auto bodies = [](const NoodleConfig& c) {
        std::vector<std::vector<Site>> v;
        v.reserve(c.noodles.size());
        for (const Noodle& nd : c.noodles) v.push_back(nd.sites);
        std::sort(v.begin(), v.end());
        return v;
    };
    return bodies(*this) == bodies(other);
}

std::uint64_t NoodleConfig::local_time(const Site& s) const
{
    std::uint64_t n = 0;
    for (const Noodle& nd : noodles)
        n += static_cast<std::uint64_t>(std::count(nd.sites.begin(), nd.sites.end(), s));
    return n;
}

std::string NoodleConfig::canonical_bytes() const
{
    std::vector<std::vector<Site>> bodies;
    bodies.reserve(noodles.size());
    for (const Noodle& nd : noodles) bodies.push_back(nd.sites);
    std::sort(bodies.begin(), bodies.end());

    std::string out;
    auto put_u64 = [&out](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    };
    put_u64(bodies.size());
    for (const auto& body : bodies) {
        put_u64(body.size());
        for (const Site& s : body) {
            put_u64(static_cast<std::uint64_t>(s.x));
            put_u64(static_cast<std::uint64_t>(s.y));
        }
    }
    return out;
}

SiteSet vacant_set_window(const Disk& window, double alpha, double kill_radius,
                          const PotentialTable& table, RngStream& rng)
{
    const std::vector<Site> K = ball_sites(window);
    SiteSet vacant(K.begin(), K.end());
    if (alpha == 0.0) return vacant;
    const HittingBundle bundle = sample_hitting_bundle(K, alpha, kill_radius, table, rng);
    const SiteSet host(K.begin(), K.end());
    for (const NoodleConfig config = noodle_config(bundle.trajectories, host);
         const Noodle& nd : config.noodles)
        for (const Site& s : nd.sites) vacant.erase(s);
    return vacant;
}

HittingBundle alpha_thinning(const HittingBundle& bundle, double alpha_new,
                             RngStream& rng)
{
    if (!(alpha_new > 0.0) || !(alpha_new <= bundle.alpha))
        throw std::invalid_argument("alpha_thinning: need 0 < alpha_new <= alpha");
    const double ratio = alpha_new / bundle.alpha;
    HittingBundle thin;
    thin.K = bundle.K;
    thin.alpha = alpha_new;
    thin.kill_radius = bundle.kill_radius;
    for (std::size_t i = 0; i < bundle.trajectories.size(); ++i) {
        if (rng.uniform() >= ratio) continue;
        thin.trajectories.push_back(bundle.trajectories[i]);
        thin.inner_span.push_back(bundle.inner_span[i]);
        const auto [lo, hi] = bundle.inner_span[i];
        for (std::size_t k = lo; k <= hi; ++k)
            thin.D_K = std::max(thin.D_K, norm(bundle.trajectories[i].sites[k]));
    }
    thin.xi_K = thin.trajectories.size();
    return thin;
}

} // namespace ri2d
