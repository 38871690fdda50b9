#pragma once

#include <cstdint>
#include <vector>

#include "ri2d/potential.hpp"
#include "ri2d/rng.hpp"
#include "ri2d/walks.hpp"

namespace ri2d {

/// Excursion-count threshold psi_{n,beta} = 2 ln^2 n / ln gamma
///                                        - (1+beta) ln n lnln n / ln gamma.
double psi(double n, double beta, double gamma);

/// Torus time horizon t_{m,beta} = (4/pi) m^2 ln^2 m
///                               - (1+beta)(2/pi) m^2 ln m lnln m.
double t_threshold(double m, double beta);

/// Coverage bookkeeping for a target disk.
struct CoverageState {
    std::vector<Site> target;
    SiteSet visited;
    bool complete = false;

    std::size_t uncovered_count() const;
};

CoverageState coverage_report(const Disk& disk,
                              const std::vector<Excursion>& excursions);

/// Sample from a finite measure.
Site sample_site(const HarmonicMeasure& hm, RngStream& rng);

/// Independent SRW excursions between the boundaries of B(0,n) and
/// B(0,gamma*n), entry points i.i.d. from the given measure on the inner
/// boundary.
std::vector<Excursion> sample_iid_excursions(int n, double gamma,
                                             std::uint64_t count,
                                             const HarmonicMeasure& entry,
                                             RngStream& rng,
                                             std::uint64_t max_steps = 1'000'000'000ULL);

struct TorusExcursionResult {
    std::uint64_t count = 0;       // completed excursions up to the horizon
    CoverageState coverage;        // coverage of the embedded B(n) by them
    std::vector<Site> entries;     // entry sites in centered disk coordinates
};

/// SRW on Z^2_m with m = floor(3 gamma n), run from a uniform start up to
/// t_{m,beta/3}; counts completed excursions between the embedded disk
/// boundaries and reports the coverage of B(n) by those excursions.
TorusExcursionResult torus_excursion_experiment(int n, double gamma, double beta,
                                                RngStream& rng);

/// Square-grid packing of disjoint disks B(x_j, gamma n / h) inside B(0,n);
/// achieves the Theta(h^2) count the union-bound argument needs.
struct PackingLayout {
    double h = 0;
    double inner_radius = 0; // n / h
    double outer_radius = 0; // gamma n / h
    std::vector<Site> centers;
};

PackingLayout disk_packing(double n, double h, double gamma);

} // namespace ri2d
