#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ri2d/potential.hpp"
#include "ri2d/rng.hpp"

namespace ri2d {

/// Marked Poisson pool over a finite boundary: independent unit-rate
/// Poisson processes in the height coordinate at every support site,
/// extended lazily. The pool itself is consumption-free; each SLT run
/// keeps its own cursors, so several coupled processes can consume the
/// same points.
class PointPool {
public:
    PointPool(std::vector<Site> support, RngStream rng);

    const std::vector<Site>& support() const { return support_; }

    /// Height of point `idx` at support site `site_idx` (0-based along the
    /// site's ordered arrivals); extends the site's process as needed.
    double height(std::size_t site_idx, std::size_t point_idx);

    /// Deterministic per-point stream for generating the mark (the
    /// excursion body attached to the point).
    RngStream mark_stream(std::size_t site_idx, std::size_t point_idx) const;

private:
    std::vector<Site> support_;
    std::vector<std::vector<double>> heights_;
    std::vector<RngStream> site_rng_;
    RngStream base_;
};

/// Consumed pool point.
struct ConsumedPoint {
    std::uint32_t site_idx;
    std::uint32_t point_idx;
    double height;
};

struct SoftField {
    std::size_t k = 0;
    std::vector<double> L; // aligned with the pool support

    bool operator==(const SoftField&) const = default;
};

struct SltResult {
    std::vector<Site> entries;
    SoftField field;
    std::vector<ConsumedPoint> consumed;
    std::vector<double> raises; // multiplicative raise per step
};

/// Density of entry measure k (0-based), aligned with the pool support;
/// must be strictly positive everywhere. The partial result carries the
/// first k entries and consumed points, so chain-dependent densities (the
/// next entry law given the previous mark) can be formed on the fly.
using DensitySequence =
    std::function<std::vector<double>(std::size_t k, const SltResult& so_far)>;

/// Sequential soft-local-time sampling: step k consumes the lowest pool
/// point reachable by raising the field along g_k, which makes the entry
/// marginal of step k exactly g_k given the past.
SltResult slt_generate(PointPool& pool, const DensitySequence& densities,
                       std::size_t k_max);

struct IidField {
    double xi_sum = 0.0;
    HarmonicMeasure hm;

    double value_at(std::size_t support_idx) const
    {
        return xi_sum * hm.weights[support_idx];
    }
};

IidField iid_field(std::size_t k, const HarmonicMeasure& hm, RngStream& rng);

/// Pointwise comparison of two fields over the same support.
bool dominance_check(const SoftField& a, const SoftField& b);
bool dominance_check(const IidField& a, const SoftField& b);

} // namespace ri2d
