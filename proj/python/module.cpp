#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "castro/error.hpp"
#include "castro/lhs.hpp"
#include "castro/metrics.hpp"
#include "castro/orchestrator.hpp"
#include "castro/problem.hpp"
#include "castro/report.hpp"
#include "castro/selection.hpp"

namespace py = pybind11;
using namespace castro;

namespace {

std::vector<Engine> parse_engines(const std::vector<std::string>& names) {
  std::vector<Engine> engines;
  for (const auto& name : names) engines.push_back(parse_engine(name));
  return engines;
}

py::dict metrics_dict(const MetricsTable& table) {
  py::dict out;
  for (const auto& row : table) {
    py::dict entry;
    entry["points"] = row.point_count;
    entry["cd"] = row.cd;
    entry["wd"] = row.wd;
    entry["variance"] = row.variance ? py::cast(*row.variance) : py::none();
    out[py::str(std::string(scope_name(row.scope)))] = entry;
  }
  return out;
}

py::dict sample(const ProblemSpec& spec, std::optional<std::string> data_path, std::uint64_t seed,
                const std::vector<std::string>& engines, unsigned threads) {
  const ExperimentDataset data = data_path ? load_experiment_csv(*data_path, spec) : empty_dataset(spec);
  RunOptions options;
  options.seed = seed;
  options.engines = parse_engines(engines);
  options.threads = threads;

  PipelineResult result;
  {
    py::gil_scoped_release release;
    result = run_pipeline(spec, data, options);
  }

  py::dict recommendations;
  for (const auto& rec : result.recommendations) {
    py::dict entry;
    entry["rows"] = rec.rows;
    entry["raw_rows"] = rec.raw_rows;
    entry["pool"] = rec.working_pool;
    entry["flagged"] = rec.flagged;
    entry["metrics"] = rec.metrics ? py::object(metrics_dict(*rec.metrics)) : py::none();
    entry["warnings"] = rec.warnings;
    recommendations[py::str(std::string(engine_name(rec.engine)))] = entry;
  }
  py::dict out;
  out["components"] = spec.component_names();
  out["recommendations"] = recommendations;
  out["manifest"] = build_manifest(spec, options, result, data.size()).dump(2);
  out["warnings"] = result.warnings;
  return out;
}

}  // namespace

PYBIND11_MODULE(_castro, m) {
  m.doc() = "Constrained sequential Latin hypercube sampling for mixture design";
  m.attr("__version__") = std::string(kToolVersion);

  auto base = py::register_exception<Error>(m, "CastroError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<InfeasibleError>(m, "InfeasibleError", base.ptr());
  py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());

  py::class_<ProblemSpec>(m, "Problem")
      .def_static("from_json", &parse_problem_config, py::arg("text"))
      .def_static("load", &load_problem_config, py::arg("path"))
      .def("to_json", &serialize_problem_config)
      .def_property_readonly("components", &ProblemSpec::component_names)
      .def_property_readonly("dimension", &ProblemSpec::dimension)
      .def_readwrite("budget", &ProblemSpec::budget)
      .def_readwrite("rounding_decimals", &ProblemSpec::rounding_decimals)
      .def("__repr__", [](const ProblemSpec& p) {
        return "<castro.Problem with " + std::to_string(p.dimension()) + " components>";
      });

  m.def("sample", &sample, py::arg("problem"), py::arg("data") = py::none(), py::arg("seed") = 0,
        py::arg("engines") = std::vector<std::string>{"lhs", "lhsmdu"}, py::arg("threads") = 0,
        "Runs the full pipeline and returns recommendations, pools, metrics and the manifest.");

  m.def(
      "latin_hypercube",
      [](std::size_t n, std::size_t d, std::uint64_t seed, const std::string& engine) {
        RngStream rng(seed);
        return draw_unit(parse_engine(engine), n, d, rng).values;
      },
      py::arg("n"), py::arg("d"), py::arg("seed") = 0, py::arg("engine") = "lhs");

  m.def("centered_l2_discrepancy", &centered_l2_discrepancy, py::arg("design"));
  m.def("wraparound_l2_discrepancy", &wraparound_l2_discrepancy, py::arg("design"));
  m.def("design_variance", &design_variance, py::arg("design"));

  m.def(
      "farthest_from_data",
      [](const SampleMatrix& candidates, const SampleMatrix& data, std::size_t k, std::optional<double> min_mutual) {
        return farthest_from_data(candidates, data, k, min_mutual).indices;
      },
      py::arg("candidates"), py::arg("data"), py::arg("k"), py::arg("min_mutual") = py::none(),
      "Indices of the picked candidates, in pick order.");

  m.def(
      "round_and_renormalize",
      [](const SampleMatrix& rows, int decimals) {
        auto out = round_and_renormalize(rows, decimals);
        return py::make_tuple(out.rows, out.flagged);
      },
      py::arg("rows"), py::arg("decimals") = 3);

  m.def(
      "pca_project_2d",
      [](const SampleMatrix& rows) {
        auto p = pca_project_2d(rows);
        return py::make_tuple(p.coords, p.explained);
      },
      py::arg("rows"), "Returns (n x 2 coordinates, explained-variance fractions).");
}
