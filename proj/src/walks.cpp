#include "ri2d/walks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ri2d/solver.hpp"

namespace ri2d {

PathSegment srw_path(Site start, const StopPredicate& stop, RngStream& rng,
                     std::uint64_t max_steps)
{
    PathSegment path;
    path.sites.push_back(start);
    Site x = start;
    if (stop(x)) return path;
    for (std::uint64_t step = 0; step < max_steps; ++step) {
        const auto nbs = neighbors(x);
        x = nbs[rng.next_u64() & 3];
        path.sites.push_back(x);
        if (stop(x)) return path;
    }
    throw TruncationError("srw_path: step budget exceeded", std::move(path));
}

PathSegment torus_srw_path(const TorusSpec& torus, Site start, std::uint64_t horizon,
                           RngStream& rng)
{
    PathSegment path;
    path.sites.reserve(horizon + 1);
    Site x = torus.wrap(start);
    path.sites.push_back(x);
    for (std::uint64_t t = 0; t < horizon; ++t) {
        const auto nbs = neighbors(x);
        x = torus.wrap(nbs[rng.next_u64() & 3]);
        path.sites.push_back(x);
    }
    return path;
}

std::array<double, 4> conditioned_step_distribution(const Site& x,
                                                    const PotentialTable& table)
{
    if (x == Site{0, 0})
        throw std::invalid_argument("conditioned_step_distribution: undefined at the origin");
    const auto nbs = neighbors(x);
    std::array<double, 4> w{};
    double total = 0.0;
    for (int k = 0; k < 4; ++k) {
        w[k] = table.at(nbs[k]);
        total += w[k];
    }
    for (int k = 0; k < 4; ++k) w[k] /= total;
    return w;
}

Site conditioned_step(const Site& x, const PotentialTable& table, RngStream& rng)
{
    const auto nbs = neighbors(x);
    double w[4];
    double total = 0.0;
    for (int k = 0; k < 4; ++k) {
        w[k] = table.at(nbs[k]);
        total += w[k];
    }
    double u = rng.uniform() * total;
    for (int k = 0; k < 3; ++k) {
        u -= w[k];
        if (u < 0) return nbs[k];
    }
    return nbs[3];
}

namespace {

PathSegment conditioned_path_once(Site start, const StopPredicate& stop,
                                  const PotentialTable& table, RngStream& rng,
                                  std::uint64_t max_steps, const SiteSet* taboo,
                                  bool& taboo_hit)
{
    taboo_hit = false;
    PathSegment path;
    path.sites.push_back(start);
    Site x = start;
    if (stop(x)) return path;
    for (std::uint64_t step = 0; step < max_steps; ++step) {
        x = conditioned_step(x, table, rng);
        path.sites.push_back(x);
        if (taboo && taboo->contains(x)) {
            taboo_hit = true;
            return path;
        }
        if (stop(x)) return path;
    }
    throw TruncationError("conditioned_path: step budget exceeded", std::move(path));
}

} // namespace

PathSegment conditioned_path(Site start, const StopPredicate& stop,
                             const PotentialTable& table, RngStream& rng,
                             std::uint64_t max_steps, const SiteSet* taboo,
                             std::uint64_t* accept_attempts)
{
    if (start == Site{0, 0})
        throw std::invalid_argument("conditioned_path: cannot start at the origin");
    constexpr std::uint64_t max_attempts = 1'000'000;
    for (std::uint64_t attempt = 1; attempt <= max_attempts; ++attempt) {
        bool taboo_hit = false;
        PathSegment p = conditioned_path_once(start, stop, table, rng, max_steps,
                                              taboo, taboo_hit);
        if (!taboo_hit) {
            if (accept_attempts) *accept_attempts = attempt;
            return p;
        }
    }
    throw std::runtime_error("conditioned_path: taboo rejection did not accept");
}

std::vector<Excursion> extract_excursions(const PathSegment& path,
                                          const StopPredicate& in_dA,
                                          const StopPredicate& in_dAprime)
{
    std::vector<Excursion> out;
    const auto& s = path.sites;
    std::size_t i = 0;
    while (i < s.size()) {
        if (!in_dA(s[i])) {
            ++i;
            continue;
        }
        std::size_t k = i + 1;
        while (k < s.size() && !in_dAprime(s[k])) ++k;
        if (k >= s.size()) break; // incomplete excursion at the horizon
        Excursion e;
        e.path.sites.assign(s.begin() + static_cast<std::ptrdiff_t>(i),
                            s.begin() + static_cast<std::ptrdiff_t>(k + 1));
        e.path.clock = path.clock + static_cast<std::int64_t>(i);
        e.entry = s[i];
        e.exit = s[k];
        out.push_back(std::move(e));
        i = k + 1;
    }
    return out;
}

// --- disk jumps -----------------------------------------------------------

bool CompressedPath::is_jump_index(std::size_t k) const
{
    return std::binary_search(jump_breaks.begin(), jump_breaks.end(),
                              static_cast<std::uint32_t>(k));
}

const DiskExitTables& DiskExitTables::instance()
{
    static DiskExitTables tables;
    return tables;
}

DiskExitTables::DiskExitTables()
{
    for (int d : {8, 16, 32, 64, 128, 256}) {
        std::vector<Site> domain = ball_sites({{0, 0}, double(d)});
        DirichletSolver solver(domain);
        std::vector<double> b(domain.size(), 0.0);
        b[static_cast<std::size_t>(solver.index_of({0, 0}))] = 1.0;
        const std::vector<double> visits = solver.solve_rhs(b, 1e-12);

        // exit mass: (1/4) of the visit count of each interior neighbor
        std::unordered_map<Site, double, SiteHash> mass;
        for (std::size_t i = 0; i < domain.size(); ++i) {
            for (const Site& z : neighbors(domain[i])) {
                if (solver.index_of(z) < 0) mass[z] += 0.25 * visits[i];
            }
        }
        Table t;
        t.radius = d;
        t.exits.reserve(mass.size());
        for (const auto& [z, m] : mass) t.exits.push_back(z);
        std::sort(t.exits.begin(), t.exits.end());
        t.cdf.reserve(t.exits.size());
        double acc = 0.0;
        for (const Site& z : t.exits) {
            acc += mass[z];
            t.cdf.push_back(acc);
        }
        // total mass is 1 up to solver tolerance; normalize the cdf
        for (double& c : t.cdf) c /= acc;
        tables_.push_back(std::move(t));
    }
}

int DiskExitTables::usable_radius(double d) const
{
    int best = 0;
    for (const auto& t : tables_)
        if (t.radius <= d) best = t.radius;
    return best;
}

Site DiskExitTables::sample_exit(int radius, RngStream& rng) const
{
    for (const auto& t : tables_) {
        if (t.radius != radius) continue;
        const double u = rng.uniform();
        const auto it = std::lower_bound(t.cdf.begin(), t.cdf.end(), u);
        const std::size_t idx = std::min<std::size_t>(
            static_cast<std::size_t>(it - t.cdf.begin()), t.exits.size() - 1);
        return t.exits[idx];
    }
    throw std::invalid_argument("DiskExitTables: no table for requested radius");
}

CompressedWalk conditioned_walk_far(Site start, double kill_radius,
                                    const PotentialTable& table, RngStream& rng,
                                    std::span<const Disk> exact_zones,
                                    const SiteSet* taboo, double fine_margin,
                                    std::uint64_t max_steps)
{
    if (start == Site{0, 0})
        throw std::invalid_argument("conditioned_walk_far: cannot start at the origin");
    const DiskExitTables& jumps = DiskExitTables::instance();
    constexpr double k2_over_pi = 0.6366197723675814;

    CompressedWalk w;
    w.path.sites.push_back(start);
    Site x = start;

    auto zone_clearance = [&](const Site& s) -> double {
        double d = norm(s); // clearance from the origin
        for (const Disk& z : exact_zones)
            d = std::min(d, norm(s - z.center) - z.radius);
        return d;
    };

    for (std::uint64_t step = 0; step < max_steps; ++step) {
        if (static_cast<double>(norm_sq(x)) > kill_radius * kill_radius) {
            w.outcome = WalkOutcome::killed;
            return w;
        }
        const double clear = zone_clearance(x);
        const int d = jumps.usable_radius(std::min(clear - 2.0, norm(x) - 2.0) / 2.0);
        if (clear > 2.0 * fine_margin && d >= 8) {
            // disk jump, exact via the a-ratio tilt of the SRW exit law
            const double rho = norm(x) + d + 1.5;
            const double a_up = k2_over_pi * std::log(rho) + table.kappa() + 1e-3;
            Site z;
            do {
                z = x + jumps.sample_exit(d, rng);
            } while (rng.uniform() * a_up > table.at(z));
            w.path.jump_breaks.push_back(
                static_cast<std::uint32_t>(w.path.sites.size() - 1));
            w.path.sites.push_back(z);
            x = z;
        } else {
            x = conditioned_step(x, table, rng);
            w.path.sites.push_back(x);
            if (taboo && taboo->contains(x)) {
                w.outcome = WalkOutcome::hit_taboo;
                return w;
            }
        }
    }
    w.outcome = WalkOutcome::truncated;
    return w;
}

} // namespace ri2d
