#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <unordered_set>
#include <vector>

namespace ri2d {

/// Lattice point of Z^2.
struct Site {
    std::int64_t x = 0;
    std::int64_t y = 0;

    friend bool operator==(const Site&, const Site&) = default;
    friend auto operator<=>(const Site&, const Site&) = default;

    Site operator+(const Site& o) const { return {x + o.x, y + o.y}; }
    Site operator-(const Site& o) const { return {x - o.x, y - o.y}; }
};

inline std::int64_t norm_sq(const Site& s)
{
    return s.x * s.x + s.y * s.y;
}

inline double norm(const Site& s)
{
    return std::sqrt(static_cast<double>(norm_sq(s)));
}

inline std::array<Site, 4> neighbors(const Site& s)
{
    return {Site{s.x + 1, s.y}, Site{s.x - 1, s.y},
            Site{s.x, s.y + 1}, Site{s.x, s.y - 1}};
}

struct SiteHash {
    std::size_t operator()(const Site& s) const
    {
        std::uint64_t z = static_cast<std::uint64_t>(s.x) * 0x9e3779b97f4a7c15ULL
                        ^ (static_cast<std::uint64_t>(s.y) + 0xbf58476d1ce4e5b9ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        return static_cast<std::size_t>(z ^ (z >> 31));
    }
};

using SiteSet = std::unordered_set<Site, SiteHash>;

/// Euclidean disk B(center, radius) on Z^2. Membership is decided on the
/// integer quantity |y - center|^2 to keep the boundary unambiguous.
struct Disk {
    Site center;
    double radius = 0.0;

    bool contains(const Site& s) const
    {
        const std::int64_t d2 = norm_sq(s - center);
        return static_cast<long double>(d2) <=
               static_cast<long double>(radius) * static_cast<long double>(radius);
    }
};

/// Torus Z^2_m; coordinates live in [0, m)^2.
struct TorusSpec {
    std::int64_t m = 3;

    Site wrap(const Site& s) const
    {
        auto md = [this](std::int64_t v) {
            v %= m;
            return v < 0 ? v + m : v;
        };
        return {md(s.x), md(s.y)};
    }
};

/// Annular shell Lambda_n = { x : n-1 < |x| <= n }.
struct Shell {
    int n = 1;
    std::vector<Site> sites;
};

std::vector<Site> ball_sites(const Disk& disk);
std::vector<Site> inner_boundary(const std::vector<Site>& a);
Shell shell(int n);

/// Shell index of a nonzero site: the unique n with n-1 < |x| <= n.
int shell_index(const Site& s);

/// Translation placing the disk center at (m/2, m/2); rejects disks that do
/// not embed injectively (2 * radius must be < m).
Site torus_embed_offset(const Disk& disk, const TorusSpec& torus);

} // namespace ri2d
