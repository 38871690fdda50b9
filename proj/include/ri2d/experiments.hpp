#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "ri2d/lattice.hpp"
#include "ri2d/potential.hpp"
#include "ri2d/report.hpp"

namespace ri2d {

struct ExperimentConfig {
    std::string id;
    std::uint64_t seed = 1;
    std::uint64_t replicas = 0; // 0 = per-experiment default
    ReportFormat format = ReportFormat::csv;
    std::string out_dir;
    std::string cache_dir;
    double truncation_limit = 0.02; // fraction of replicas allowed to truncate
    std::map<std::string, double> params;

    double param(const std::string& key, double fallback) const;
};

/// Reads seed / replicas / format / truncation_limit / params from a JSON
/// file; unknown keys are rejected.
ExperimentConfig load_config_file(const std::string& path);

/// Applies one "key=value" override (numeric, or format=csv|json|plotdata).
void apply_override(ExperimentConfig& cfg, const std::string& kv);

const std::vector<std::string>& experiment_ids();

struct ExperimentOutcome {
    ResultTable table;
    std::uint64_t truncated = 0;
    std::uint64_t attempted = 0;
    bool truncation_exceeded = false;
};

ExperimentOutcome run_experiment(const ExperimentConfig& cfg);

/// Process-wide potential-kernel table (tabulated on B(200)), optionally
/// persisted under cache_dir.
const PotentialTable& shared_potential(const std::string& cache_dir = {});

/// Re-entry law of the torus walk: starting from a point outside the disk
/// B(n) embedded in Z^2_m, m = floor(3 gamma n), the distribution of the
/// site where B(n) is next entered. One sparse factorization per kernel;
/// one back-solve per distinct starting point, cached.
class TorusEntryKernel {
public:
    TorusEntryKernel(int n, double gamma);
    ~TorusEntryKernel();

    /// Entry sites in disk-centered coordinates, sorted.
    const std::vector<Site>& support() const { return support_; }

    /// Law over support() from a start in disk-centered coordinates.
    const std::vector<double>& row(const Site& from);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::vector<Site> support_;
    std::unordered_map<Site, std::vector<double>, SiteHash> cache_;
};

} // namespace ri2d
