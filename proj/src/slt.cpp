#include "ri2d/slt.hpp"

#include <limits>
#include <stdexcept>

namespace ri2d {

PointPool::PointPool(std::vector<Site> support, RngStream rng)
    : support_(std::move(support)), base_(rng)
{
    if (support_.empty())
        throw std::invalid_argument("PointPool: empty support");
    heights_.resize(support_.size());
    site_rng_.reserve(support_.size());
    for (std::size_t i = 0; i < support_.size(); ++i)
        site_rng_.push_back(base_.derive(i));
}

double PointPool::height(std::size_t site_idx, std::size_t point_idx)
{
    auto& hs = heights_[site_idx];
    while (hs.size() <= point_idx) {
        const double prev = hs.empty() ? 0.0 : hs.back();
        hs.push_back(prev + site_rng_[site_idx].exponential());
    }
    return hs[point_idx];
}

RngStream PointPool::mark_stream(std::size_t site_idx, std::size_t point_idx) const
{
    return base_.derive(0xa11ce5ULL)
        .derive(site_idx)
        .derive(point_idx);
}

SltResult slt_generate(PointPool& pool, const DensitySequence& densities,
                       std::size_t k_max)
{
    const std::size_t ns = pool.support().size();
    SltResult res;
    res.field.L.assign(ns, 0.0);
    // per-run cursors; points below the running field are exactly the
    // consumed ones, so per-site consumption is ordered by height
    std::vector<std::size_t> cursor(ns, 0);

    for (std::size_t k = 0; k < k_max; ++k) {
        const std::vector<double> g = densities(k, res);
        if (g.size() != ns)
            throw std::invalid_argument("slt_generate: density size mismatch");
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_site = ns;
        for (std::size_t z = 0; z < ns; ++z) {
            if (!(g[z] > 0.0))
                throw std::invalid_argument("slt_generate: density must be strictly positive");
            const double h = pool.height(z, cursor[z]);
            const double t = (h - res.field.L[z]) / g[z];
            // ties broken toward the lexicographically smallest site, which
            // is the pool support order only if the caller sorted it; use
            // explicit site comparison to be order-independent
            if (t < best ||
                (t == best && best_site < ns &&
                 pool.support()[z] < pool.support()[best_site])) {
                best = t;
                best_site = z;
            }
        }
        for (std::size_t z = 0; z < ns; ++z) res.field.L[z] += best * g[z];
        res.consumed.push_back({static_cast<std::uint32_t>(best_site),
                                static_cast<std::uint32_t>(cursor[best_site]),
                                pool.height(best_site, cursor[best_site])});
        res.entries.push_back(pool.support()[best_site]);
        res.raises.push_back(best);
        ++cursor[best_site];
        ++res.field.k;
    }
    return res;
}

IidField iid_field(std::size_t k, const HarmonicMeasure& hm, RngStream& rng)
{
    IidField f;
    f.hm = hm;
    for (std::size_t i = 0; i < k; ++i) f.xi_sum += rng.exponential();
    return f;
}

bool dominance_check(const SoftField& a, const SoftField& b)
{
    if (a.L.size() != b.L.size())
        throw std::invalid_argument("dominance_check: support mismatch");
    for (std::size_t i = 0; i < a.L.size(); ++i)
        if (a.L[i] > b.L[i]) return false;
    return true;
}

bool dominance_check(const IidField& a, const SoftField& b)
{
    if (a.hm.weights.size() != b.L.size())
        throw std::invalid_argument("dominance_check: support mismatch");
    for (std::size_t i = 0; i < b.L.size(); ++i)
        if (a.value_at(i) > b.L[i]) return false;
    return true;
}

} // namespace ri2d
