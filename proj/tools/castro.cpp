// castro: constrained sequential Latin hypercube sampling for mixture design.
//
//   castro sample  --config problem.json --data experiments.csv --out results/
//   castro metrics --config problem.json --design results/recommendations_lhs.csv
//   castro project --input data=experiments.csv --input lhs=results/recommendations_lhs.csv --out proj.csv

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "castro/error.hpp"
#include "castro/metrics.hpp"
#include "castro/orchestrator.hpp"
#include "castro/problem.hpp"
#include "castro/report.hpp"

namespace fs = std::filesystem;
using namespace castro;

namespace {

enum ExitCode { kOk = 0, kConfigError = 2, kInfeasible = 3, kIoError = 4 };

struct SampleArgs {
  std::string config;
  std::string data;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string method = "both";
  std::optional<std::size_t> tot_samp;
  std::optional<std::size_t> budget;
  std::optional<std::size_t> pool_size;
  std::optional<int> decimals;
  std::optional<std::size_t> max_rej;
  bool all_select = false;
  std::optional<std::size_t> num_select;
  unsigned threads = 0;
  bool lenient = false;
  bool quiet = false;
};

struct MetricsArgs {
  std::string config;
  std::string design;
  std::string data;
  std::string pool;
  bool json = false;
};

struct ProjectArgs {
  std::vector<std::string> inputs;
  std::string out;
};

std::uint64_t default_seed(const ProblemSpec& spec) {
  if (const char* env = std::getenv("CASTRO_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ConfigError(std::string("CASTRO_SEED is not an unsigned integer: '") + env + "'");
    }
  }
  return spec.sampler.seed;
}

void apply_overrides(ProblemSpec& spec, const SampleArgs& args) {
  if (args.tot_samp) {
    spec.sampler.tot_samp = *args.tot_samp;
    for (auto& sub : spec.partition) {
      if (sub.kind == SubproblemSpec::Kind::Main) sub.tot_samp = *args.tot_samp;
    }
  }
  if (args.budget) spec.budget = *args.budget;
  if (args.pool_size) spec.sampler.pool_size = *args.pool_size;
  if (args.decimals) spec.rounding_decimals = *args.decimals;
  if (args.max_rej) spec.sampler.max_rej = *args.max_rej;
  if (args.num_select) {
    spec.sampler.all_select = false;
    spec.sampler.num_select = *args.num_select;
  }
  if (args.all_select) {
    spec.sampler.all_select = true;
    spec.sampler.num_select = 0;
  }
  spec.sampler.seed = args.seed ? *args.seed : default_seed(spec);
}

std::vector<Engine> parse_method(const std::string& method) {
  if (method == "both") return {Engine::Lhs, Engine::Lhsmdu};
  return {parse_engine(method)};
}

int cmd_sample(const SampleArgs& args) {
  ProblemSpec spec = load_problem_config(args.config);
  apply_overrides(spec, args);
  validate_problem(spec);

  LoadOptions load;
  load.lenient = args.lenient;
  const ExperimentDataset data = args.data.empty() ? empty_dataset(spec) : load_experiment_csv(args.data, spec, load);
  if (!data.out_of_bounds_rows.empty()) {
    std::cerr << "warning: " << data.out_of_bounds_rows.size()
              << " data rows lie outside the component bounds; they are kept for distance calculations\n";
  }

  RunOptions options;
  options.seed = spec.sampler.seed;
  options.engines = parse_method(args.method);
  options.threads = args.threads;

  const PipelineResult result = run_pipeline(spec, data, options);

  for (const auto& rec : result.recommendations) {
    for (Eigen::Index r = 0; r < rec.rows.rows(); ++r) {
      const std::string problem = validate_recommendation_row(row_vector(rec.rows, r), spec, 1e-9, 1e-9);
      if (!problem.empty()) {
        throw InfeasibleError(std::string(engine_name(rec.engine)) + " recommendation row " + std::to_string(r) +
                              " fails re-validation: " + problem);
      }
    }
  }

  std::error_code ec;
  fs::create_directories(args.out, ec);
  if (ec) throw IoError("cannot create output directory '" + args.out + "': " + ec.message());

  const auto names = spec.component_names();
  for (const auto& rec : result.recommendations) {
    const std::string engine(engine_name(rec.engine));
    write_file((fs::path(args.out) / ("recommendations_" + engine + ".csv")).string(),
               format_csv(rec.rows, names, spec.rounding_decimals));
    write_file((fs::path(args.out) / ("pool_" + engine + ".csv")).string(), format_csv(rec.working_pool, names, 12));
  }

  auto manifest = build_manifest(spec, options, result, data.size());
  if (!args.data.empty()) manifest["data_sha256"] = sha256_hex(read_file(args.data));
  write_file((fs::path(args.out) / "manifest.json").string(), manifest.dump(2) + "\n");

  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  if (!args.quiet) {
    for (const auto& rec : result.recommendations) {
      std::cout << engine_name(rec.engine) << ": " << rec.rows.rows() << " recommendations from a working pool of "
                << rec.working_pool.rows() << '\n';
      if (rec.metrics) {
        std::cout << format_metrics_table(*rec.metrics);
      } else {
        std::cout << "metrics unavailable: " << rec.metrics_error << '\n';
      }
    }
  }
  return kOk;
}

SampleMatrix columns_in_order(const LabeledTable& table, const std::vector<std::string>& names,
                              const std::string& source) {
  SampleMatrix out(table.rows.rows(), static_cast<Eigen::Index>(names.size()));
  for (std::size_t c = 0; c < names.size(); ++c) {
    const auto it = std::find(table.columns.begin(), table.columns.end(), names[c]);
    if (it == table.columns.end()) throw DataError(source + ": missing column '" + names[c] + "'");
    out.col(static_cast<Eigen::Index>(c)) = table.rows.col(it - table.columns.begin());
  }
  return out;
}

int cmd_metrics(const MetricsArgs& args) {
  const ProblemSpec spec = load_problem_config(args.config);
  const auto names = spec.component_names();
  const SampleMatrix design = columns_in_order(read_csv_table(args.design), names, args.design);
  const SampleMatrix data = args.data.empty() ? SampleMatrix(0, design.cols())
                                              : columns_in_order(read_csv_table(args.data), names, args.data);
  const SampleMatrix pool = args.pool.empty() ? design : columns_in_order(read_csv_table(args.pool), names, args.pool);

  const auto bounds = full_bounds(spec);
  const SampleMatrix unit_design = scale_to_unit_cube(design, bounds);
  MetricsTable table;
  table[0] = compute_metrics(MetricsScope::Selected, unit_design);
  table[1] = compute_metrics(MetricsScope::SelectedPlusData,
                             data.rows() > 0 ? vstack(unit_design, scale_to_unit_cube(data, bounds)) : unit_design);
  table[2] = compute_metrics(MetricsScope::Pool, scale_to_unit_cube(pool, bounds));

  if (args.json) {
    std::cout << metrics_json(table).dump(2) << '\n';
  } else {
    std::cout << format_metrics_table(table);
  }
  if (design.rows() < 2) std::cerr << "warning: variance needs at least two design points\n";
  return kOk;
}

int cmd_project(const ProjectArgs& args) {
  std::vector<std::string> labels;
  std::vector<std::string> columns;
  SampleMatrix all;
  for (const auto& input : args.inputs) {
    const auto eq = input.find('=');
    const std::string path = eq == std::string::npos ? input : input.substr(eq + 1);
    const std::string label = eq == std::string::npos ? fs::path(path).stem().string() : input.substr(0, eq);
    const LabeledTable table = read_csv_table(path);
    SampleMatrix rows;
    if (columns.empty()) {
      columns = table.columns;
      rows = table.rows;
    } else {
      for (const auto& name : table.columns) {
        if (std::find(columns.begin(), columns.end(), name) == columns.end()) {
          throw DataError(path + ": column '" + name + "' does not appear in the first input");
        }
      }
      rows = columns_in_order(table, columns, path);
    }
    all = all.rows() == 0 ? rows : vstack(all, rows);
    labels.insert(labels.end(), static_cast<std::size_t>(rows.rows()), label);
  }

  const Projection proj = pca_project_2d(all);
  std::string out = "source,pc1,pc2\n";
  char buf[96];
  for (Eigen::Index r = 0; r < proj.coords.rows(); ++r) {
    std::snprintf(buf, sizeof buf, ",%.9f,%.9f\n", proj.coords(r, 0), proj.coords(r, 1));
    out += labels[static_cast<std::size_t>(r)] + buf;
  }
  if (args.out.empty()) {
    std::cout << out;
  } else {
    write_file(args.out, out);
  }
  std::cerr << "explained variance: " << proj.explained[0] << ", " << proj.explained[1] << '\n';
  for (std::size_t c : proj.dropped_columns) std::cerr << "note: dropped constant column '" << columns[c] << "'\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constrained sequential Latin hypercube sampling for mixture experiments"};
  app.require_subcommand(1);

  SampleArgs sample;
  auto* sample_cmd = app.add_subcommand("sample", "Generate recommendations for the next experiments");
  sample_cmd->add_option("--config", sample.config, "Problem definition (JSON)")->required();
  sample_cmd->add_option("--data", sample.data, "Previous experiments (CSV with component columns)");
  sample_cmd->add_option("--out", sample.out, "Output directory")->required();
  sample_cmd->add_option("--seed", sample.seed, "Master seed (default: $CASTRO_SEED, then the config)");
  sample_cmd->add_option("--method", sample.method, "Sampling engine")
      ->check(CLI::IsMember({"lhs", "lhsmdu", "both"}));
  sample_cmd->add_option("--tot-samp", sample.tot_samp, "Samples drawn across all permutations of the main problem");
  sample_cmd->add_option("--budget", sample.budget, "Number of recommended experiments");
  sample_cmd->add_option("--pool-size", sample.pool_size, "Working shortlist size per subproblem");
  sample_cmd->add_option("--decimals", sample.decimals, "Decimal places of the recommendations");
  sample_cmd->add_option("--max-rej", sample.max_rej, "Unpaired rows tolerated per draw");
  auto* all_flag = sample_cmd->add_flag("--all-select", sample.all_select, "Stack every permutation's samples");
  sample_cmd->add_option("--num-select", sample.num_select, "Keep this many samples per permutation by distance")
      ->excludes(all_flag);
  sample_cmd->add_option("--threads", sample.threads, "Worker threads (0: hardware concurrency)");
  sample_cmd->add_flag("--lenient", sample.lenient, "Renormalize data rows that do not sum to one");
  sample_cmd->add_flag("-q,--quiet", sample.quiet, "Do not print the metrics summary");

  MetricsArgs metrics;
  auto* metrics_cmd = app.add_subcommand("metrics", "Discrepancy and variance of a design");
  metrics_cmd->add_option("--config", metrics.config, "Problem definition supplying the bounds")->required();
  metrics_cmd->add_option("--design", metrics.design, "Design CSV")->required();
  metrics_cmd->add_option("--data", metrics.data, "Previous experiments CSV");
  metrics_cmd->add_option("--pool", metrics.pool, "Candidate pool CSV (default: the design)");
  metrics_cmd->add_flag("--json", metrics.json, "Print JSON instead of CSV");

  ProjectArgs project;
  auto* project_cmd = app.add_subcommand("project", "Standard-scale and project labeled CSVs onto two principal axes");
  project_cmd->add_option("--input", project.inputs, "CSV file, optionally as label=path")->required();
  project_cmd->add_option("--out", project.out, "Output CSV (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfigError;
  }

  try {
    if (*sample_cmd) return cmd_sample(sample);
    if (*metrics_cmd) return cmd_metrics(metrics);
    if (*project_cmd) return cmd_project(project);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIoError;
  }
  return kOk;
}
