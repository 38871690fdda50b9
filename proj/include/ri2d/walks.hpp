#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "ri2d/lattice.hpp"
#include "ri2d/potential.hpp"
#include "ri2d/rng.hpp"

namespace ri2d {

/// Finite piece of a nearest-neighbor trajectory.
struct PathSegment {
    std::vector<Site> sites;
    std::int64_t clock = 0; // time index of sites[0]
};

/// A path exceeded its step budget; carries the partial path.
class TruncationError : public std::runtime_error {
public:
    TruncationError(std::string what, PathSegment partial)
        : std::runtime_error(std::move(what)), partial_path(std::move(partial)) {}
    PathSegment partial_path;
};

/// Excursion between the inner boundaries of nested sets A and A'.
struct Excursion {
    PathSegment path;
    Site entry;
    Site exit;
    int annulus_n = 0;       // descriptor: inner disk index
    double annulus_gamma = 0; // descriptor: outer/inner radius ratio
};

using StopPredicate = std::function<bool(const Site&)>;

PathSegment srw_path(Site start, const StopPredicate& stop, RngStream& rng,
                     std::uint64_t max_steps = 1'000'000'000ULL);

PathSegment torus_srw_path(const TorusSpec& torus, Site start, std::uint64_t horizon,
                           RngStream& rng);

/// Doob transform by the potential kernel: step x -> y with probability
/// a(y) / (4 a(x)); the walk never visits the origin. Order matches
/// neighbors(x).
std::array<double, 4> conditioned_step_distribution(const Site& x,
                                                    const PotentialTable& table);

Site conditioned_step(const Site& x, const PotentialTable& table, RngStream& rng);

/// Conditioned-walk path until the stop predicate fires. With a taboo set
/// the path is resampled until it avoids it (rejection); attempts are
/// reported through accept_attempts when given.
PathSegment conditioned_path(Site start, const StopPredicate& stop,
                             const PotentialTable& table, RngStream& rng,
                             std::uint64_t max_steps = 1'000'000'000ULL,
                             const SiteSet* taboo = nullptr,
                             std::uint64_t* accept_attempts = nullptr);

/// Maximal decomposition of a path into excursions from in_dA to the first
/// subsequent visit of in_dAprime; only completed excursions are returned.
std::vector<Excursion> extract_excursions(const PathSegment& path,
                                          const StopPredicate& in_dA,
                                          const StopPredicate& in_dAprime);

// --- accelerated far-field sampling -------------------------------------

/// Unit-step path with occasional long "disk jumps": sites[k] -> sites[k+1]
/// is not a lattice step exactly when k is listed in jump_breaks. Jumps are
/// exact in law (SRW disk-exit resampling tilted by the a-ratio) and are
/// only taken far away from every exact zone, the origin and the taboo set,
/// so all visits near those sets are unit-resolved.
struct CompressedPath {
    std::vector<Site> sites;
    std::vector<std::uint32_t> jump_breaks;

    bool is_jump_index(std::size_t k) const;
};

enum class WalkOutcome { killed, hit_taboo, truncated };

struct CompressedWalk {
    CompressedPath path;
    WalkOutcome outcome = WalkOutcome::killed;
};

/// Exit distributions from the center of B(0, d) for a fixed set of radii,
/// computed once per process by a linear solve and shared.
class DiskExitTables {
public:
    static const DiskExitTables& instance();

    /// Largest available radius <= d, or 0 when d is below the smallest.
    int usable_radius(double d) const;
    Site sample_exit(int radius, RngStream& rng) const;

private:
    DiskExitTables();
    struct Table {
        int radius;
        std::vector<Site> exits;
        std::vector<double> cdf;
    };
    std::vector<Table> tables_;
};

/// Runs the conditioned walk from start until it leaves B(0, kill_radius),
/// enters the taboo set, or exhausts the budget. Unit steps are used within
/// `fine_margin` of every exact zone (and near the origin); elsewhere the
/// walk advances by disk jumps.
CompressedWalk conditioned_walk_far(Site start, double kill_radius,
                                    const PotentialTable& table, RngStream& rng,
                                    std::span<const Disk> exact_zones,
                                    const SiteSet* taboo = nullptr,
                                    double fine_margin = 12.0,
                                    std::uint64_t max_steps = 1'000'000'000ULL);

} // namespace ri2d
