#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "ri2d/couplings.hpp"
#include "ri2d/excursions.hpp"
#include "ri2d/experiments.hpp"
#include "ri2d/interlacements.hpp"
#include "ri2d/potential.hpp"
#include "ri2d/report.hpp"
#include "ri2d/rng.hpp"
#include "ri2d/slt.hpp"
#include "ri2d/stats.hpp"
#include "ri2d/walks.hpp"

namespace py = pybind11;
using namespace ri2d;

namespace {

std::vector<Site> to_sites(const std::vector<std::pair<std::int64_t, std::int64_t>>& v)
{
    std::vector<Site> out;
    out.reserve(v.size());
    for (const auto& [x, y] : v) out.push_back({x, y});
    return out;
}

py::list from_sites(const std::vector<Site>& v)
{
    py::list out;
    for (const Site& s : v) out.append(py::make_tuple(s.x, s.y));
    return out;
}

} // namespace

PYBIND11_MODULE(_ri2d, m)
{
    m.doc() = "planar random-interlacement and excursion-process laboratory";

    py::class_<RngStream>(m, "RngStream")
        .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"),
             py::arg("stream") = 0)
        .def("derive", &RngStream::derive)
        .def("uniform", &RngStream::uniform)
        .def("exponential", &RngStream::exponential, py::arg("mean") = 1.0)
        .def("poisson", &RngStream::poisson);

    py::class_<PotentialTable>(m, "PotentialTable")
        .def_property_readonly("R", &PotentialTable::R)
        .def_property_readonly("kappa", &PotentialTable::kappa)
        .def("at",
             [](const PotentialTable& t, std::int64_t x, std::int64_t y) {
                 return t.at({x, y});
             })
        .def("harmonicity_residual", &PotentialTable::harmonicity_residual);

    m.def("potential_table",
          [](int R) { return potential_kernel(R); }, py::arg("R") = 100);
    m.def("shared_potential",
          []() -> const PotentialTable& { return shared_potential(); },
          py::return_value_policy::reference);

    py::class_<HarmonicMeasure>(m, "HarmonicMeasure")
        .def_property_readonly(
            "support",
            [](const HarmonicMeasure& h) { return from_sites(h.support); })
        .def_readonly("weights", &HarmonicMeasure::weights)
        .def("weight_of", [](const HarmonicMeasure& h, std::int64_t x,
                             std::int64_t y) { return h.weight_of({x, y}); });

    m.def("capacity",
          [](const std::vector<std::pair<std::int64_t, std::int64_t>>& a) {
              return capacity(to_sites(a), shared_potential()).value;
          });
    m.def("equilibrium_harmonic_measure",
          [](const std::vector<std::pair<std::int64_t, std::int64_t>>& a) {
              return equilibrium_harmonic_measure(to_sites(a), shared_potential());
          });
    m.def(
        "conditional_harmonic_measure",
        [](const std::vector<std::pair<std::int64_t, std::int64_t>>& a,
           std::pair<std::int64_t, std::int64_t> center, double radius,
           bool conditioned) {
            return conditional_harmonic_measure(
                to_sites(a), Disk{{center.first, center.second}, radius},
                conditioned);
        },
        py::arg("a"), py::arg("center"), py::arg("radius"),
        py::arg("conditioned") = false);
    m.def("ball_sites",
          [](std::pair<std::int64_t, std::int64_t> center, double radius) {
              return from_sites(ball_sites({{center.first, center.second}, radius}));
          });

    m.def("psi", &psi, py::arg("n"), py::arg("beta"), py::arg("gamma"));
    m.def("t_threshold", &t_threshold, py::arg("m"), py::arg("beta"));
    m.def("sample_N", &sample_N);
    m.def("downward_threshold", &downward_threshold);
    m.def("normal_cdf", &normal_cdf);
    m.def("chi_square_pvalue", &chi_square_pvalue);
    m.def("wilson_ci", [](std::uint64_t s, std::uint64_t n, double z) {
        const Interval i = wilson_ci(s, n, z);
        return py::make_tuple(i.lo, i.hi);
    });

    py::class_<TvBound>(m, "TvBound")
        .def_readonly("exact", &TvBound::exact)
        .def_readonly("bound", &TvBound::bound);
    m.def("poisson_intensity_tv", &poisson_intensity_tv);
    m.def("poisson_shift_tv", &poisson_shift_tv);
    m.def("poisson_pair_tv", &poisson_pair_tv);

    py::class_<CompressedPath>(m, "CompressedPath")
        .def_property_readonly(
            "sites", [](const CompressedPath& p) { return from_sites(p.sites); })
        .def_readonly("jump_breaks", &CompressedPath::jump_breaks);

    py::class_<HittingBundle>(m, "HittingBundle")
        .def_readonly("alpha", &HittingBundle::alpha)
        .def_readonly("xi_K", &HittingBundle::xi_K)
        .def_readonly("D_K", &HittingBundle::D_K)
        .def_readonly("trajectories", &HittingBundle::trajectories);

    m.def("sample_hitting_bundle",
          [](const std::vector<std::pair<std::int64_t, std::int64_t>>& K,
             double alpha, double kill_radius, RngStream& rng) {
              return sample_hitting_bundle(to_sites(K), alpha, kill_radius,
                                           shared_potential(), rng);
          });
    m.def("vacant_set_window",
          [](std::pair<std::int64_t, std::int64_t> center, double radius,
             double alpha, double kill_radius, RngStream& rng) {
              const SiteSet v = vacant_set_window(
                  Disk{{center.first, center.second}, radius}, alpha,
                  kill_radius, shared_potential(), rng);
              std::vector<Site> sorted(v.begin(), v.end());
              std::sort(sorted.begin(), sorted.end());
              return from_sites(sorted);
          });

    py::class_<ResultTable>(m, "ResultTable")
        .def_readonly("meta", &ResultTable::meta)
        .def_readonly("columns", &ResultTable::columns)
        .def_readonly("rows", &ResultTable::rows);

    py::class_<ExperimentOutcome>(m, "ExperimentOutcome")
        .def_readonly("table", &ExperimentOutcome::table)
        .def_readonly("truncated", &ExperimentOutcome::truncated)
        .def_readonly("truncation_exceeded", &ExperimentOutcome::truncation_exceeded);

    m.def(
        "run_experiment",
        [](const std::string& id, std::uint64_t seed, std::uint64_t replicas,
           const std::map<std::string, double>& params) {
            ExperimentConfig cfg;
            cfg.id = id;
            cfg.seed = seed;
            cfg.replicas = replicas;
            cfg.params = params;
            return run_experiment(cfg);
        },
        py::arg("id"), py::arg("seed") = 1, py::arg("replicas") = 0,
        py::arg("params") = std::map<std::string, double>{});
    m.def("experiment_ids", [] { return experiment_ids(); });
    m.def("render_report", [](const ResultTable& t, const std::string& fmt) {
        std::ostringstream os;
        emit_report(t, parse_format(fmt), os);
        return os.str();
    });
}
