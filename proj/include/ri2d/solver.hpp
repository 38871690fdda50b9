#pragma once

#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

#include "ri2d/lattice.hpp"

namespace ri2d {

/// Dirichlet problem for the SRW Laplacian on an arbitrary finite site
/// domain: solve f(x) = (1/4) sum_{y ~ x} f(y) inside, with prescribed
/// values on every neighbor outside the domain. Matrix-free conjugate
/// gradients; the operator I - P restricted to the domain is symmetric
/// positive definite.
class DirichletSolver {
public:
    explicit DirichletSolver(const std::vector<Site>& domain);

    std::size_t size() const { return sites_.size(); }
    const std::vector<Site>& sites() const { return sites_; }

    /// Index of a domain site, or -1.
    std::int64_t index_of(const Site& s) const;

    /// Solve with boundary data g evaluated on exterior neighbors.
    /// rel_tol is on the residual relative to the RHS norm.
    std::vector<double> solve(const std::function<double(const Site&)>& g,
                              double rel_tol = 1e-12) const;

    /// Solve with an explicit right-hand side b (for x in the domain):
    /// (I - P) f = b. Used for expected-visit counts and entrance laws.
    std::vector<double> solve_rhs(const std::vector<double>& b,
                                  double rel_tol = 1e-12) const;

private:
    void apply(const std::vector<double>& f, std::vector<double>& out) const;
    std::vector<double> cg(const std::vector<double>& b, double rel_tol) const;

    std::vector<Site> sites_;
    std::unordered_map<Site, std::int64_t, SiteHash> index_;
    std::vector<std::array<std::int32_t, 4>> nbr_; // -1 marks an exterior neighbor
};

} // namespace ri2d
