#include "ri2d/potential.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "ri2d/solver.hpp"

namespace ri2d {

namespace {
constexpr double k2_over_pi = 0.6366197723675814; // 2/pi
} // namespace

PotentialTable::PotentialTable(int R, double kappa, std::vector<double> values)
    : R_(R), kappa_(kappa), values_(std::move(values))
{
    if (R_ < 2) throw std::invalid_argument("PotentialTable: R must be >= 2");
    const auto side = static_cast<std::size_t>(2 * R_ + 1);
    if (values_.size() != side * side)
        throw std::invalid_argument("PotentialTable: value count mismatch");
    table_limit_sq_ = static_cast<std::int64_t>(R_ - 1) * (R_ - 1);
}

double PotentialTable::harmonicity_residual(int r) const
{
    if (r >= R_) throw std::invalid_argument("harmonicity_residual: r must be < R");
    double worst = 0.0;
    for (std::int64_t x = -r; x <= r; ++x) {
        for (std::int64_t y = -r; y <= r; ++y) {
            const Site s{x, y};
            const std::int64_t d2 = norm_sq(s);
            if (d2 == 0 || d2 >= static_cast<std::int64_t>(r) * r) continue;
            double avg = 0.0;
            for (const Site& nb : neighbors(s)) avg += at(nb);
            worst = std::max(worst, std::abs(0.25 * avg - at(s)));
        }
    }
    return worst;
}

void PotentialTable::save(const std::string& path) const
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("PotentialTable::save: cannot open " + path);
    const char magic[8] = {'R', 'I', '2', 'D', 'P', 'O', 'T', '1'};
    out.write(magic, 8);
    const std::int64_t R64 = R_;
    out.write(reinterpret_cast<const char*>(&R64), 8);
    out.write(reinterpret_cast<const char*>(&kappa_), 8);
    const std::uint64_t n = values_.size();
    out.write(reinterpret_cast<const char*>(&n), 8);
    out.write(reinterpret_cast<const char*>(values_.data()),
              static_cast<std::streamsize>(n * sizeof(double)));
}

PotentialTable PotentialTable::load(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("PotentialTable::load: cannot open " + path);
    char magic[8];
    in.read(magic, 8);
    if (std::string(magic, 8) != "RI2DPOT1")
        throw std::runtime_error("PotentialTable::load: bad magic in " + path);
    std::int64_t R64 = 0;
    double kappa = 0.0;
    std::uint64_t n = 0;
    in.read(reinterpret_cast<char*>(&R64), 8);
    in.read(reinterpret_cast<char*>(&kappa), 8);
    in.read(reinterpret_cast<char*>(&n), 8);
    std::vector<double> values(n);
    in.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) throw std::runtime_error("PotentialTable::load: truncated file " + path);
    return PotentialTable(static_cast<int>(R64), kappa, std::move(values));
}

PotentialTable potential_kernel(int R, double rel_tol,
                                const std::optional<std::string>& cache_dir)
{
    if (R < 2) throw std::invalid_argument("potential_kernel: R must be >= 2");

    std::string cache_path;
    if (cache_dir) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "potential_R%d_tol%.3e.bin", R, rel_tol);
        cache_path = *cache_dir + "/" + buf;
        if (std::filesystem::exists(cache_path))
            return PotentialTable::load(cache_path);
    }

    // Domain: 0 < |x| <= R-1. Exterior neighbors are either the origin
    // (value 0) or sites beyond R-1 carrying the asymptotic boundary data.
    std::vector<Site> domain;
    const std::int64_t lim2 = static_cast<std::int64_t>(R - 1) * (R - 1);
    for (std::int64_t x = -(R - 1); x <= R - 1; ++x)
        for (std::int64_t y = -(R - 1); y <= R - 1; ++y)
            if (!(x == 0 && y == 0) && x * x + y * y <= lim2)
                domain.push_back({x, y});

    DirichletSolver solver(domain);
    auto g_log = [&](const Site& s) -> double {
        const std::int64_t d2 = norm_sq(s);
        if (d2 == 0) return 0.0;
        return 0.5 * k2_over_pi * std::log(static_cast<double>(d2));
    };
    auto g_one = [&](const Site& s) -> double {
        return norm_sq(s) == 0 ? 0.0 : 1.0;
    };
    const std::vector<double> base = solver.solve(g_log, rel_tol);
    const std::vector<double> unit = solver.solve(g_one, rel_tol);

    const std::int64_t i10 = solver.index_of({1, 0});
    const double kappa = (1.0 - base[static_cast<std::size_t>(i10)]) /
                         unit[static_cast<std::size_t>(i10)];

    const std::size_t side = static_cast<std::size_t>(2 * R + 1);
    std::vector<double> values(side * side, 0.0);
    auto put = [&](const Site& s, double v) {
        values[static_cast<std::size_t>((s.y + R) * (2 * R + 1) + (s.x + R))] = v;
    };
    for (std::int64_t x = -R; x <= R; ++x) {
        for (std::int64_t y = -R; y <= R; ++y) {
            const Site s{x, y};
            const std::int64_t d2 = norm_sq(s);
            if (d2 == 0) continue;
            const std::int64_t i = solver.index_of(s);
            if (i >= 0)
                put(s, base[static_cast<std::size_t>(i)] +
                           kappa * unit[static_cast<std::size_t>(i)]);
            else
                put(s, 0.5 * k2_over_pi * std::log(static_cast<double>(d2)) + kappa);
        }
    }

    PotentialTable table(R, kappa, std::move(values));
    if (!cache_path.empty()) table.save(cache_path);
    return table;
}

double HarmonicMeasure::weight_of(const Site& s) const
{
    for (std::size_t i = 0; i < support.size(); ++i)
        if (support[i] == s) return weights[i];
    return 0.0;
}

namespace {

HarmonicMeasure normalize_measure(std::vector<Site> support, std::vector<double> raw)
{
    double total = 0.0;
    for (double& w : raw) {
        if (w < 0) {
            if (w < -1e-9) throw std::runtime_error("harmonic measure: negative weight");
            w = 0.0;
        }
        total += w;
    }
    if (total <= 0)
        throw std::runtime_error("harmonic measure: degenerate (zero total mass)");
    for (double& w : raw) w /= total;
    return HarmonicMeasure{std::move(support), std::move(raw)};
}

} // namespace

HarmonicMeasure conditional_harmonic_measure(const std::vector<Site>& A,
                                             const Disk& Aprime,
                                             bool conditioned,
                                             const PotentialTable* table,
                                             double rel_tol)
{
    if (A.empty()) throw std::invalid_argument("conditional_harmonic_measure: empty A");
    if (conditioned && table == nullptr)
        throw std::invalid_argument("conditional_harmonic_measure: conditioned solve needs a potential table");
    SiteSet a_set(A.begin(), A.end());
    if (conditioned && a_set.contains({0, 0}))
        throw std::invalid_argument("conditional_harmonic_measure: conditioned walk is undefined on sets containing the origin");

    const std::vector<Site> prime_sites = ball_sites(Aprime);
    SiteSet prime_boundary;
    for (const Site& s : inner_boundary(prime_sites)) prime_boundary.insert(s);

    std::vector<Site> domain;
    domain.reserve(prime_sites.size());
    for (const Site& s : prime_sites) {
        if (a_set.contains(s) || prime_boundary.contains(s)) continue;
        if (conditioned && s == Site{0, 0}) continue;
        if (!Aprime.contains(s))
            continue; // defensive; ball_sites already guarantees membership
        domain.push_back(s);
    }
    bool a_inside = false;
    for (const Site& s : A)
        if (Aprime.contains(s)) { a_inside = true; break; }
    if (!a_inside || domain.empty())
        throw std::invalid_argument("conditional_harmonic_measure: container does not enclose A with room to spare");

    DirichletSolver solver(domain);
    // value of the (transformed) escape function on non-domain sites
    auto exterior = [&](const Site& s) -> double {
        if (a_set.contains(s)) return 0.0;
        if (conditioned) {
            if (s == Site{0, 0}) return 0.0;
            if (prime_boundary.contains(s)) return table->at(s);
            return 0.0;
        }
        return prime_boundary.contains(s) ? 1.0 : 0.0;
    };
    const std::vector<double> f = solver.solve(exterior, rel_tol);

    auto value_at = [&](const Site& s) -> double {
        const std::int64_t i = solver.index_of(s);
        if (i >= 0) return f[static_cast<std::size_t>(i)];
        return exterior(s);
    };

    std::vector<Site> support = inner_boundary(A);
    std::vector<double> raw(support.size(), 0.0);
    for (std::size_t i = 0; i < support.size(); ++i) {
        const Site& y = support[i];
        double acc = 0.0;
        for (const Site& z : neighbors(y)) acc += value_at(z);
        raw[i] = 0.25 * acc;
        if (conditioned) {
            const double ay = table->at(y);
            raw[i] = ay > 0 ? raw[i] / ay : 0.0;
        }
    }
    return normalize_measure(std::move(support), std::move(raw));
}

HarmonicMeasure harmonic_measure(const std::vector<Site>& A, int R_far, double rel_tol)
{
    std::int64_t max2 = 0;
    for (const Site& s : A) max2 = std::max(max2, norm_sq(s));
    const double reach = std::sqrt(static_cast<double>(max2)) + 1.0;
    if (static_cast<double>(R_far) < 4.0 * reach)
        throw std::invalid_argument("harmonic_measure: R_far too small relative to A");
    return conditional_harmonic_measure(A, Disk{{0, 0}, static_cast<double>(R_far)},
                                        false, nullptr, rel_tol);
}

HarmonicMeasure equilibrium_harmonic_measure(const std::vector<Site>& A,
                                             const PotentialTable& table)
{
    if (A.empty()) throw std::invalid_argument("equilibrium_harmonic_measure: empty A");
    if (A.size() == 1) return HarmonicMeasure{{A[0]}, {1.0}};

    const auto n = static_cast<Eigen::Index>(A.size());
    Eigen::MatrixXd Q(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            Q(i, j) = table.at(A[static_cast<std::size_t>(i)] -
                               A[static_cast<std::size_t>(j)]);
    const Eigen::VectorXd nu = Q.partialPivLu().solve(Eigen::VectorXd::Ones(n));

    std::vector<Site> support(A);
    std::vector<double> raw(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
        raw[static_cast<std::size_t>(i)] = nu(i);
    return normalize_measure(std::move(support), std::move(raw));
}

Capacity capacity(const std::vector<Site>& A, const PotentialTable& table)
{
    SiteSet a_set(A.begin(), A.end());
    if (!a_set.contains({0, 0}))
        throw std::invalid_argument("capacity: set must contain the origin");
    if (A.size() == 1) return Capacity{0.0};
    const HarmonicMeasure hm = equilibrium_harmonic_measure(A, table);
    double cap = 0.0;
    for (std::size_t i = 0; i < hm.support.size(); ++i)
        cap += hm.weights[i] * table.at(hm.support[i]);
    return Capacity{cap};
}

} // namespace ri2d
