#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "ordelic/io.hpp"

namespace py = pybind11;
using namespace ordelic;

namespace {

SimplexPoint point(const std::vector<double>& p) { return SimplexPoint(p); }

Population population_from(const std::string& scenario_json, const std::string& dataset_csv,
                           std::size_t outcomes) {
  if (!dataset_csv.empty()) {
    std::istringstream in(dataset_csv);
    return cells_from_dataset(read_dataset_csv(in, outcomes));
  }
  return scenario_from_json(Json::parse(scenario_json)).population();
}

}  // namespace

PYBIND11_MODULE(_ordelic, m) {
  m.doc() = "Lipschitz surrogates for orderable discrete properties";

  py::register_exception<Error>(m, "OrdelicError", PyExc_ValueError);

  py::class_<Surrogate>(m, "Surrogate")
      .def_static("from_json",
                  [](const std::string& text) { return surrogate_from_json(Json::parse(text)); })
      .def("to_json", [](const Surrogate& s) { return surrogate_to_json(s).dump(); })
      .def_property_readonly("kind", [](const Surrogate& s) { return std::string(s.kind()); })
      .def_property_readonly("outcomes", &Surrogate::outcomes)
      .def_property_readonly("reports", &Surrogate::reports)
      .def_property_readonly("thresholds", &Surrogate::thresholds)
      .def_property_readonly("range",
                             [](const Surrogate& s) { return std::pair(s.gamma_min(), s.gamma_max()); })
      .def("gamma", [](const Surrogate& s, const std::vector<double>& p) { return s.gamma(point(p)); })
      .def("link", &Surrogate::link)
      .def("discrete",
           [](const Surrogate& s, const std::vector<double>& p) { return s.discrete(point(p)); })
      .def("lipschitz", [](const Surrogate& s, const std::string& norm) {
        return s.lipschitz(parse_norm(norm));
      }, py::arg("norm") = "l2");

  m.def(
      "construct",
      [](const std::string& spec_json, const std::string& algo,
         std::optional<std::vector<double>> phi, std::optional<double> outer_slope,
         std::uint64_t seed) {
        auto r = construct_surrogate(property_from_json(Json::parse(spec_json)), algo, phi,
                                     outer_slope, seed);
        return std::pair(std::move(r.surrogate), r.details.dump());
      },
      py::arg("spec_json"), py::arg("algo") = "normals", py::arg("phi") = std::nullopt,
      py::arg("outer_slope") = std::nullopt, py::arg("seed") = 0);

  m.def(
      "refinement_check",
      [](const Surrogate& s, std::size_t samples, std::uint64_t seed) {
        const auto r = refinement_check(s, samples, seed);
        return std::pair(r.checked, r.passed);
      },
      py::arg("surrogate"), py::arg("samples"), py::arg("seed") = 0);

  m.def(
      "level_set_grid",
      [](const Surrogate& s, std::size_t resolution) {
        std::vector<std::tuple<std::vector<double>, std::vector<int>, double>> out;
        for (const auto& r : level_set_grid(s, resolution)) out.emplace_back(r.p.vec(), r.discrete, r.surrogate);
        return out;
      },
      py::arg("surrogate"), py::arg("resolution"));

  m.def(
      "simulate",
      [](const std::string& scenario_json, std::size_t rows, std::uint64_t seed) {
        const auto sc = scenario_from_json(Json::parse(scenario_json));
        std::ostringstream csv;
        write_dataset_csv(csv, simulate_dataset(sc, rows, seed));
        return std::pair(csv.str(), predictor_to_json(materialize_predictor(sc, seed)).dump());
      },
      py::arg("scenario_json"), py::arg("rows"), py::arg("seed") = 0);

  m.def(
      "audit",
      [](const Surrogate& s, const std::string& predictor_json, const std::string& scenario_json,
         const std::string& dataset_csv, const std::string& norm, std::optional<double> bin_width,
         std::optional<double> marginal_lipschitz) {
        AuditOptions opts;
        opts.norm = parse_norm(norm);
        opts.binning.width = bin_width;
        opts.marginal_lipschitz = marginal_lipschitz;
        const auto cells = population_from(scenario_json, dataset_csv, s.outcomes());
        return audit_to_json(s, cells, predictor_from_json(Json::parse(predictor_json)), opts).dump();
      },
      py::arg("surrogate"), py::arg("predictor_json"), py::arg("scenario_json") = "",
      py::arg("dataset_csv") = "", py::arg("norm") = "l2", py::arg("bin_width") = std::nullopt,
      py::arg("marginal_lipschitz") = std::nullopt);

  m.def(
      "lipschitz_estimate",
      [](const Surrogate& s, const std::string& norm, std::size_t samples, std::uint64_t seed) {
        const auto r = lipschitz_estimate(property_fn(s), s.outcomes(), parse_norm(norm), samples, seed);
        return std::tuple(r.ratio, r.p.vec(), r.q.vec());
      },
      py::arg("surrogate"), py::arg("norm") = "l2", py::arg("samples") = 20000, py::arg("seed") = 0);

  m.def(
      "counterexample",
      [](const Surrogate& s, double constant, const std::string& norm, std::size_t budget,
         std::uint64_t seed) {
        const auto cx = counterexample_gap(property_fn(s), s.outcomes(), constant, parse_norm(norm),
                                           budget, seed);
        Json j{{"found", cx.found},
               {"ratio", cx.pair.ratio},
               {"p", cx.pair.p.vec()},
               {"q", cx.pair.q.vec()},
               {"audits", {audit_report_to_json(cx.distribution), audit_report_to_json(cx.surrogate)}}};
        return j.dump();
      },
      py::arg("surrogate"), py::arg("constant"), py::arg("norm") = "l2", py::arg("budget") = 20000,
      py::arg("seed") = 0);
}
