#include "ri2d/lattice.hpp"

#include <stdexcept>

namespace ri2d {

std::vector<Site> ball_sites(const Disk& disk)
{
    if (disk.radius < 0)
        throw std::invalid_argument("ball_sites: negative radius");
    std::vector<Site> out;
    const std::int64_t r = static_cast<std::int64_t>(std::floor(disk.radius));
    out.reserve(static_cast<std::size_t>(3.3 * (r + 1) * (r + 1)) + 1);
    for (std::int64_t dx = -r; dx <= r; ++dx) {
        for (std::int64_t dy = -r; dy <= r; ++dy) {
            Site s{disk.center.x + dx, disk.center.y + dy};
            if (disk.contains(s)) out.push_back(s);
        }
    }
    return out;
}

std::vector<Site> inner_boundary(const std::vector<Site>& a)
{
    SiteSet in(a.begin(), a.end());
    std::vector<Site> out;
    for (const Site& s : a) {
        for (const Site& nb : neighbors(s)) {
            if (!in.contains(nb)) {
                out.push_back(s);
                break;
            }
        }
    }
    return out;
}

int shell_index(const Site& s)
{
    const std::int64_t d2 = norm_sq(s);
    if (d2 == 0)
        throw std::invalid_argument("shell_index: origin belongs to no shell");
    // smallest n with n^2 >= d2
    auto n = static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(d2))));
    while (n * n < d2) ++n;
    while (n >= 1 && (n - 1) * (n - 1) >= d2) --n;
    return static_cast<int>(n);
}

Shell shell(int n)
{
    if (n < 1) throw std::invalid_argument("shell: n must be >= 1");
    Shell sh;
    sh.n = n;
    const std::int64_t lo2 = static_cast<std::int64_t>(n - 1) * (n - 1);
    const std::int64_t hi2 = static_cast<std::int64_t>(n) * n;
    for (std::int64_t dx = -n; dx <= n; ++dx) {
        for (std::int64_t dy = -n; dy <= n; ++dy) {
            const std::int64_t d2 = dx * dx + dy * dy;
            if (d2 > lo2 && d2 <= hi2) sh.sites.push_back({dx, dy});
        }
    }
    return sh;
}

Site torus_embed_offset(const Disk& disk, const TorusSpec& torus)
{
    if (torus.m < 3)
        throw std::invalid_argument("torus_embed_offset: m must be >= 3");
    if (2.0 * disk.radius >= static_cast<double>(torus.m))
        throw std::invalid_argument("torus_embed_offset: disk does not fit injectively");
    return {torus.m / 2 - disk.center.x, torus.m / 2 - disk.center.y};
}

} // namespace ri2d
