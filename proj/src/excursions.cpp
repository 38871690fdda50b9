#include "ri2d/excursions.hpp"

#include <cmath>
#include <stdexcept>

namespace ri2d {

double psi(double n, double beta, double gamma)
{
    if (!(n > std::exp(1.0)))
        throw std::invalid_argument("psi: need n > e");
    if (!(gamma > 1.0))
        throw std::invalid_argument("psi: need gamma > 1");
    const double ln = std::log(n);
    return (2.0 * ln * ln - (1.0 + beta) * ln * std::log(ln)) / std::log(gamma);
}

double t_threshold(double m, double beta)
{
    if (!(m > std::exp(1.0)))
        throw std::invalid_argument("t_threshold: need m > e");
    const double ln = std::log(m);
    constexpr double pi = 3.141592653589793238;
    return (4.0 / pi) * m * m * ln * ln -
           (1.0 + beta) * (2.0 / pi) * m * m * ln * std::log(ln);
}

std::size_t CoverageState::uncovered_count() const
{
    std::size_t missing = 0;
    for (const Site& s : target)
        if (!visited.contains(s)) ++missing;
    return missing;
}

CoverageState coverage_report(const Disk& disk,
                              const std::vector<Excursion>& excursions)
{
    CoverageState st;
    st.target = ball_sites(disk);
    for (const Excursion& e : excursions)
        for (const Site& s : e.path.sites)
            if (disk.contains(s)) st.visited.insert(s);
    st.complete = st.uncovered_count() == 0;
    return st;
}

Site sample_site(const HarmonicMeasure& hm, RngStream& rng)
{
    double u = rng.uniform();
    for (std::size_t i = 0; i + 1 < hm.support.size(); ++i) {
        u -= hm.weights[i];
        if (u < 0) return hm.support[i];
    }
    return hm.support.back();
}

namespace {

/// y is on the inner boundary of B(0, r): inside, with a neighbor outside.
inline bool on_disk_boundary(const Site& s, double r)
{
    const auto r2 = static_cast<long double>(r) * r;
    if (static_cast<long double>(norm_sq(s)) > r2) return false;
    for (const Site& nb : neighbors(s))
        if (static_cast<long double>(norm_sq(nb)) > r2) return true;
    return false;
}

} // namespace

std::vector<Excursion> sample_iid_excursions(int n, double gamma,
                                             std::uint64_t count,
                                             const HarmonicMeasure& entry,
                                             RngStream& rng,
                                             std::uint64_t max_steps)
{
    if (!(gamma > 1.0))
        throw std::invalid_argument("sample_iid_excursions: need gamma > 1");
    const double outer = gamma * n;
    std::vector<Excursion> out;
    out.reserve(count);
    for (std::uint64_t k = 0; k < count; ++k) {
        const Site y = sample_site(entry, rng);
        PathSegment body = srw_path(
            y, [outer](const Site& s) { return on_disk_boundary(s, outer); }, rng,
            max_steps);
        Excursion e;
        e.entry = y;
        e.exit = body.sites.back();
        e.path = std::move(body);
        e.annulus_n = n;
        e.annulus_gamma = gamma;
        out.push_back(std::move(e));
    }
    return out;
}

TorusExcursionResult torus_excursion_experiment(int n, double gamma, double beta,
                                                RngStream& rng)
{
    if (n < 8) throw std::invalid_argument("torus_excursion_experiment: need n >= 8");
    const std::int64_t m = static_cast<std::int64_t>(std::floor(3.0 * gamma * n));
    const TorusSpec torus{m};
    const Site center{m / 2, m / 2};
    const double inner = n;
    const double outer = gamma * n;
    const auto horizon =
        static_cast<std::uint64_t>(t_threshold(static_cast<double>(m), beta / 3.0));

    TorusExcursionResult res;
    res.coverage.target = ball_sites({{0, 0}, inner});

    Site x{static_cast<std::int64_t>(rng.uniform_int(static_cast<std::uint64_t>(m))),
           static_cast<std::int64_t>(rng.uniform_int(static_cast<std::uint64_t>(m)))};

    bool in_excursion = false;
    std::vector<Site> pending; // centered coordinates of the current excursion
    for (std::uint64_t t = 0; t < horizon; ++t) {
        const auto nbs = neighbors(x);
        x = torus.wrap(nbs[rng.next_u64() & 3]);
        const Site c = x - center; // no wrap correction needed: 2*outer < m
        if (in_excursion) {
            pending.push_back(c);
            if (on_disk_boundary(c, outer)) {
                ++res.count;
                for (const Site& s : pending)
                    if (static_cast<double>(norm_sq(s)) <= inner * inner)
                        res.coverage.visited.insert(s);
                pending.clear();
                in_excursion = false;
            }
        } else if (on_disk_boundary(c, inner)) {
            in_excursion = true;
            pending.assign(1, c);
            res.entries.push_back(c);
        }
    }
    if (in_excursion) res.entries.pop_back(); // incomplete at the horizon
    res.coverage.complete = res.coverage.uncovered_count() == 0;
    return res;
}

PackingLayout disk_packing(double n, double h, double gamma)
{
    if (!(h > gamma))
        throw std::invalid_argument("disk_packing: need h > gamma");
    PackingLayout layout;
    layout.h = h;
    layout.inner_radius = n / h;
    layout.outer_radius = gamma * n / h;
    const auto spacing =
        static_cast<std::int64_t>(std::ceil(2.0 * layout.outer_radius)) + 1;
    const double reach = n - layout.outer_radius;
    if (reach < 0) return layout;
    const auto kmax = static_cast<std::int64_t>(reach / static_cast<double>(spacing)) + 1;
    for (std::int64_t i = -kmax; i <= kmax; ++i) {
        for (std::int64_t j = -kmax; j <= kmax; ++j) {
            const Site c{i * spacing, j * spacing};
            if (norm(c) + layout.outer_radius <= n) layout.centers.push_back(c);
        }
    }
    return layout;
}

} // namespace ri2d
