#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ri2d/potential.hpp"
#include "ri2d/rng.hpp"
#include "ri2d/walks.hpp"

namespace ri2d {

/// The sigma_K part of an interlacement sample: the trajectories hitting a
/// finite set K, truncated at a kill radius. Trajectories are stored as
/// compressed two-sided paths, unit-resolved inside the exact zones used
/// for sampling (which always cover K).
struct HittingBundle {
    std::vector<Site> K;
    double alpha = 1.0;
    double kill_radius = 0.0;
    std::uint64_t xi_K = 0;
    double D_K = 0.0;
    std::vector<CompressedPath> trajectories;
    std::vector<std::pair<std::size_t, std::size_t>> inner_span; // [tau-, tau+] indices
};

/// Maximal sub-path of a trajectory inside a host set A.
struct Noodle {
    std::uint32_t trajectory_id = 0;
    std::uint32_t start = 0; // index of the first site within its trajectory
    std::vector<Site> sites;
    bool two_sided = false;

    bool operator==(const Noodle&) const = default;
};

/// Interlacement configuration on a host set: a multiset of noodles,
/// stored in a canonical order for reproducible serialization.
struct NoodleConfig {
    std::vector<Noodle> noodles;

    void canonicalize();
    /// Multiset equality (ignores trajectory ids and ordering).
    bool same_noodles(const NoodleConfig& other) const;
    /// Visit count of a site, reconstructed from the noodles.
    std::uint64_t local_time(const Site& s) const;

    /// Order-independent byte serialization (noodle bodies, sorted); two
    /// configs serialize identically iff same_noodles holds.
    std::string canonical_bytes() const;
};

/// Sample sigma_K of RI(alpha): xi_K ~ Poisson(pi alpha cap({0} u K))
/// trajectories, each with entry from the conditioned-walk harmonic
/// measure of K, a forward conditioned path and a backward escape path
/// (conditioned not to re-enter K), both truncated at the kill radius.
HittingBundle sample_hitting_bundle(const std::vector<Site>& K, double alpha,
                                    double kill_radius,
                                    const PotentialTable& table, RngStream& rng);

/// Exact partition of trajectories by "intersects K".
std::pair<std::vector<CompressedPath>, std::vector<CompressedPath>>
decompose(const std::vector<CompressedPath>& trajectories, const SiteSet& K);

/// Noodles of the trajectories on host set A. A must be unit-resolved in
/// the trajectories (covered by the exact zones used when sampling).
NoodleConfig noodle_config(const std::vector<CompressedPath>& trajectories,
                           const SiteSet& A);

/// Sites of the window disk left unvisited by RI(alpha).
SiteSet vacant_set_window(const Disk& window, double alpha, double kill_radius,
                          const PotentialTable& table, RngStream& rng);

/// Monotone coupling of rates: keep each trajectory independently with
/// probability alpha_new / bundle.alpha.
HittingBundle alpha_thinning(const HittingBundle& bundle, double alpha_new,
                             RngStream& rng);

/// Entry measure used for bundles: conditioned-walk conditional harmonic
/// measure of K \ {0} against a container around K.
HarmonicMeasure bundle_entry_measure(const std::vector<Site>& K,
                                     const PotentialTable& table);

} // namespace ri2d
