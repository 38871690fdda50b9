#include "ri2d/solver.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ri2d {

DirichletSolver::DirichletSolver(const std::vector<Site>& domain)
    : sites_(domain)
{
    index_.reserve(sites_.size() * 2);
    for (std::size_t i = 0; i < sites_.size(); ++i)
        index_.emplace(sites_[i], static_cast<std::int64_t>(i));
    nbr_.resize(sites_.size());
    for (std::size_t i = 0; i < sites_.size(); ++i) {
        const auto nbs = neighbors(sites_[i]);
        for (int k = 0; k < 4; ++k) {
            auto it = index_.find(nbs[k]);
            nbr_[i][k] = (it == index_.end()) ? -1
                       : static_cast<std::int32_t>(it->second);
        }
    }
}

std::int64_t DirichletSolver::index_of(const Site& s) const
{
    auto it = index_.find(s);
    return it == index_.end() ? -1 : it->second;
}

void DirichletSolver::apply(const std::vector<double>& f, std::vector<double>& out) const
{
    const std::size_t n = sites_.size();
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int k = 0; k < 4; ++k) {
            const std::int32_t j = nbr_[i][k];
            if (j >= 0) acc += f[static_cast<std::size_t>(j)];
        }
        out[i] = f[i] - 0.25 * acc;
    }
}

std::vector<double> DirichletSolver::cg(const std::vector<double>& b, double rel_tol) const
{
    const std::size_t n = sites_.size();
    std::vector<double> x(n, 0.0), r = b, p = b, ap(n);
    double bnorm2 = 0.0;
    for (double v : b) bnorm2 += v * v;
    if (bnorm2 == 0.0) return x;
    double rr = bnorm2;
    const double target = rel_tol * rel_tol * bnorm2;
    // grid Laplacians need O(diameter) iterations; 64 * sqrt(n) is generous
    const std::size_t max_iter = 200 + 64 * static_cast<std::size_t>(std::sqrt(double(n)));
    for (std::size_t it = 0; it < max_iter; ++it) {
        apply(p, ap);
        double pap = 0.0;
        for (std::size_t i = 0; i < n; ++i) pap += p[i] * ap[i];
        const double alpha = rr / pap;
        double rr_new = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
            rr_new += r[i] * r[i];
        }
        if (rr_new <= target) return x;
        const double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    }
    throw std::runtime_error("DirichletSolver: CG did not converge, residual " +
                             std::to_string(std::sqrt(rr / bnorm2)));
}

std::vector<double> DirichletSolver::solve(const std::function<double(const Site&)>& g,
                                           double rel_tol) const
{
    std::vector<double> b(sites_.size(), 0.0);
    for (std::size_t i = 0; i < sites_.size(); ++i) {
        const auto nbs = neighbors(sites_[i]);
        for (int k = 0; k < 4; ++k)
            if (nbr_[i][k] < 0) b[i] += 0.25 * g(nbs[k]);
    }
    return cg(b, rel_tol);
}

std::vector<double> DirichletSolver::solve_rhs(const std::vector<double>& b,
                                               double rel_tol) const
{
    if (b.size() != sites_.size())
        throw std::invalid_argument("solve_rhs: size mismatch");
    return cg(b, rel_tol);
}

} // namespace ri2d
