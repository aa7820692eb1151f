// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "castro/conditioned.hpp"
#include "castro/error.hpp"
#include "castro/metrics.hpp"
#include "castro/orchestrator.hpp"
#include "castro/report.hpp"
#include "castro/rng.hpp"
#include "castro/synthesis.hpp"
#include "../oracles.hpp"

using namespace castro;

namespace {

std::string data_path(const std::string& name) { return std::string(CASTRO_DATA_DIR) + "/" + name; }

int failures = 0;

void report(int number, bool pass, const std::string& title, const std::string& detail) {
  std::printf("%s criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", number, title.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fraction(std::size_t hits, std::size_t total) {
  return std::to_string(hits) + "/" + std::to_string(total);
}

std::string fixed(double v, int decimals = 4) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(decimals);
  out << v;
  return out.str();
}

bool row_feasible(const SampleMatrix& rows, Eigen::Index r, std::span<const ComponentBounds> bounds, double sum_tol) {
  if (std::abs(row_sum(rows, r) - 1.0) > sum_tol) return false;
  for (std::size_t c = 0; c < bounds.size(); ++c) {
    if (!bounds[c].contains(rows(r, static_cast<Eigen::Index>(c)), 1e-12)) return false;
  }
  return true;
}

std::size_t count_infeasible(const SampleMatrix& rows, std::span<const ComponentBounds> bounds, double sum_tol) {
  std::size_t bad = 0;
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    if (!row_feasible(rows, r, bounds, sum_tol)) ++bad;
  }
  return bad;
}

RunOptions options_for(std::uint64_t seed, unsigned threads = 0) {
  RunOptions options;
  options.seed = seed;
  options.threads = threads;
  return options;
}

constexpr std::size_t kSeeds = 50;

struct FourDimRuns {
  std::vector<PipelineResult> results;
  std::vector<double> seconds;
};

FourDimRuns run_four_dim(const ProblemSpec& spec, const ExperimentDataset& data) {
  FourDimRuns runs;
  for (std::size_t seed = 1; seed <= kSeeds; ++seed) {
    const auto start = std::chrono::steady_clock::now();
    runs.results.push_back(run_pipeline(spec, data, options_for(seed)));
    runs.seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  return runs;
}

void feasibility(const ProblemSpec& spec, const FourDimRuns& runs) {
  const auto bounds = full_bounds(spec);
  std::size_t violations = 0;
  std::size_t checked = 0;
  double slowest = 0.0;
  for (std::size_t i = 0; i < runs.results.size(); ++i) {
    const auto& result = runs.results[i];
    slowest = std::max(slowest, runs.seconds[i]);
    for (const auto& engine : result.subproblems.front().engines) {
      violations += count_infeasible(engine.pool, bounds, 1e-12);
      checked += static_cast<std::size_t>(engine.pool.rows());
    }
    for (const auto& rec : result.recommendations) {
      violations += count_infeasible(rec.raw_rows, bounds, 1e-12);
      violations += count_infeasible(rec.rows, bounds, 1e-9);
      violations += rec.flagged.size();
      checked += 2 * static_cast<std::size_t>(rec.rows.rows());
      if (rec.rows.rows() != static_cast<Eigen::Index>(spec.budget)) ++violations;
    }
  }
  report(1, violations == 0 && slowest < 10.0, "4-D pool and recommendation feasibility",
         std::to_string(violations) + " violations in " + std::to_string(checked) + " rows over " +
             std::to_string(runs.results.size()) + " seeds, slowest seed " + fixed(slowest, 2) + " s");
}

void yields(const FourDimRuns& runs) {
  std::size_t lhs_hits = 0;
  std::size_t mdu_hits = 0;
  std::size_t lhs_min = SIZE_MAX;
  std::size_t mdu_min = SIZE_MAX;
  for (const auto& result : runs.results) {
    const auto lhs = result.subproblems.front().engine(Engine::Lhs).raw_pool_size;
    const auto mdu = result.subproblems.front().engine(Engine::Lhsmdu).raw_pool_size;
    lhs_hits += lhs >= 85;
    mdu_hits += mdu >= 85;
    lhs_min = std::min(lhs_min, lhs);
    mdu_min = std::min(mdu_min, mdu);
  }

  const ProblemSpec nine = load_problem_config(data_path("case9d.json"));
  const auto empty = empty_dataset(nine);
  std::size_t amino_hits[2] = {0, 0};
  std::size_t metal_hits[2] = {0, 0};
  for (std::size_t seed = 1; seed <= kSeeds; ++seed) {
    const auto amino = run_subproblem(nine, 1, empty, options_for(seed), 90);
    const auto metal = run_subproblem(nine, 2, empty, options_for(seed), 90);
    for (std::size_t e = 0; e < 2; ++e) {
      amino_hits[e] += amino.engines[e].raw_pool_size >= 85;
      metal_hits[e] += metal.engines[e].raw_pool_size >= 85;
    }
  }

  const std::size_t need90 = (kSeeds * 9 + 9) / 10;
  const std::size_t need80 = (kSeeds * 8 + 9) / 10;
  const bool pass = lhs_hits >= need90 && mdu_hits >= need90 && amino_hits[0] >= need80 &&
                    amino_hits[1] >= need80 && metal_hits[0] >= need90 && metal_hits[1] >= need90;
  report(2, pass, "feasible-row yields",
         "4-D >=85 rows: lhs " + fraction(lhs_hits, kSeeds) + " (min " + std::to_string(lhs_min) + "), lhsmdu " +
             fraction(mdu_hits, kSeeds) + " (min " + std::to_string(mdu_min) + "); amino lhs " +
             fraction(amino_hits[0], kSeeds) + ", lhsmdu " + fraction(amino_hits[1], kSeeds) + "; metal lhs " +
             fraction(metal_hits[0], kSeeds) + ", lhsmdu " + fraction(metal_hits[1], kSeeds));
}

void metric_ordering(const FourDimRuns& runs) {
  std::size_t cd_hits = 0;
  std::size_t wd_hits = 0;
  std::size_t var_hits = 0;
  std::size_t measured = 0;
  double var_lo = 1.0;
  double var_hi = 0.0;
  for (const auto& result : runs.results) {
    const auto& rec = result.recommendation(Engine::Lhs);
    if (!rec.metrics) continue;
    ++measured;
    const auto& [selected, with_data, pool] = *rec.metrics;
    cd_hits += pool.cd < selected.cd && selected.cd < with_data.cd;
    wd_hits += pool.wd < selected.wd && selected.wd < with_data.wd;
    const double var = pool.variance.value_or(-1.0);
    var_lo = std::min(var_lo, var);
    var_hi = std::max(var_hi, var);
    var_hits += std::abs(var - 1.0 / 12.0) <= 0.03;
  }
  const std::size_t need = (kSeeds * 9 + 9) / 10;
  const bool pass = measured == kSeeds && cd_hits >= need && wd_hits >= need && var_hits == kSeeds;
  report(3, pass, "4-D metric ordering pool < 15 < 15 + data",
         "CD " + fraction(cd_hits, kSeeds) + ", WD " + fraction(wd_hits, kSeeds) + ", pool variance in 1/12 +- 0.03 " +
             fraction(var_hits, kSeeds) + " (range " + fixed(var_lo) + ".." + fixed(var_hi) + ")");
}

void discrepancy_oracles() {
  bool pass = true;
  SampleMatrix centre(1, 1);
  centre << 0.5;
  double worst = std::abs(centered_l2_discrepancy(centre) - std::sqrt(1.0 / 12.0));
  RngStream rng(404);
  for (int t = 0; t < 10; ++t) {
    SampleMatrix p(1, 1);
    p << rng.uniform();
    worst = std::max(worst, std::abs(wraparound_l2_discrepancy(p) - std::sqrt(1.0 / 6.0)));
  }
  pass = pass && worst <= 1e-12;

  double oracle_gap = 0.0;
  double shift_gap = 0.0;
  for (int t = 0; t < 20; ++t) {
    const auto n = static_cast<Eigen::Index>(2 + rng.below(14));
    const auto d = static_cast<Eigen::Index>(1 + rng.below(5));
    SampleMatrix x(n, d);
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < d; ++c) x(r, c) = rng.uniform();
    }
    oracle_gap = std::max(oracle_gap, std::abs(centered_l2_discrepancy(x) - oracle::centered_l2(x)));
    oracle_gap = std::max(oracle_gap, std::abs(wraparound_l2_discrepancy(x) - oracle::wraparound_l2(x)));
    const double shift = rng.uniform();
    SampleMatrix shifted = x;
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < d; ++c) shifted(r, c) = std::fmod(x(r, c) + shift, 1.0);
    }
    shift_gap = std::max(shift_gap, std::abs(wraparound_l2_discrepancy(x) - wraparound_l2_discrepancy(shifted)));
  }
  pass = pass && oracle_gap <= 1e-12 && shift_gap <= 1e-10;
  report(4, pass, "discrepancy oracles",
         "closed forms off by " + fixed(worst, 17) + ", brute force off by " + fixed(oracle_gap, 17) +
             ", shift changes WD by " + fixed(shift_gap, 15));
}

bool no_duplicates(const std::vector<std::size_t>& v) {
  return std::set<std::size_t>(v.begin(), v.end()).size() == v.size();
}

void pairing() {
  RngStream rng(5005);
  std::size_t below_greedy = 0;
  std::size_t above_max = 0;
  std::size_t dirty = 0;
  std::size_t improved = 0;
  for (int instance = 0; instance < 200; ++instance) {
    const std::size_t n = 1 + rng.below(6);
    const bool later_stage = instance % 2 == 1;
    std::vector<double> a(n);
    std::vector<double> b(n);
    for (auto& v : a) v = later_stage ? 0.2 + 0.8 * rng.uniform() : rng.uniform();
    for (auto& v : b) v = rng.uniform();
    auto state = build_pairing(a, b, later_stage ? PairingState::Rule::PositiveAtMostOne : PairingState::Rule::AtMostOne);
    std::vector<bool> adj(n * n, false);
    for (const auto& [i, k] : state.feasible_pairs) adj[i * n + k] = true;
    const std::size_t greedy = state.matched();
    const std::size_t best = oracle::max_matching(adj, n, n);
    bool clean = state.consistent();
    const PairingObserver watch = [&](const PairingState& s) {
      clean = clean && s.consistent() && no_duplicates(s.left) && no_duplicates(s.right);
    };
    if (later_stage) {
      repair_pairing_gt3(state, n, default_max_rej(n), rng, watch);
    } else {
      repair_pairing(state, n, rng, watch);
    }
    below_greedy += state.matched() < greedy;
    above_max += state.matched() > best;
    dirty += !clean;
    improved += state.matched() > greedy;
  }
  report(5, below_greedy == 0 && above_max == 0 && dirty == 0, "pairing repair bounded by greedy and maximum matching",
         "200 instances: " + std::to_string(below_greedy) + " below greedy, " + std::to_string(above_max) +
             " above maximum, " + std::to_string(dirty) + " with duplicate or inconsistent lists, " +
             std::to_string(improved) + " improved by repair");
}

bool support_allowed(const std::vector<double>& row, const SynthesisConstraint& c) {
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (row[i] > 0.0) support.push_back(i);
  }
  if (support.size() == 1) return c.single_allowed(support[0]);
  if (support.size() == 2) return c.pair_allowed(support[0], support[1]);
  return false;
}

std::vector<double> random_composition(std::size_t n, RngStream& rng) {
  std::vector<double> row(n);
  double total = 0.0;
  for (auto& v : row) {
    v = rng.uniform() < 0.2 ? 0.0 : rng.uniform();
    total += v;
  }
  if (total == 0.0) row[rng.below(n)] = total = 1.0;
  for (auto& v : row) v /= total;
  return row;
}

void synthesis() {
  const ProblemSpec nine = load_problem_config(data_path("case9d.json"));
  const auto subs = effective_subproblems(nine);
  const SynthesisConstraint amino = *subs[1].synthesis;
  const SynthesisConstraint metal = *subs[2].synthesis;
  RngStream rng(6006);

  std::size_t amino_bad = 0;
  for (int t = 0; t < 10000; ++t) {
    const auto out = apply_synthesis(random_composition(4, rng), amino);
    double sum = 0.0;
    for (double v : out.row) sum += v;
    if (!out.accepted() || !support_allowed(out.row, amino) || std::abs(sum - 1.0) > 1e-12) ++amino_bad;
  }
  std::size_t metal_bad = 0;
  for (int t = 0; t < 10000; ++t) {
    const auto out = apply_synthesis(random_composition(3, rng), metal);
    std::size_t ones = 0;
    std::size_t zeros = 0;
    for (double v : out.row) {
      ones += v == 1.0;
      zeros += v == 0.0;
    }
    if (ones != 1 || zeros != 2) ++metal_bad;
  }

  // Columns: CS, BN, THAM, MEL.
  const auto kept = apply_synthesis(std::vector<double>{0.3, 0.05, 0.05, 0.6}, amino);
  const bool kept_ok = std::abs(kept.row[0] - 1.0 / 3.0) <= 1e-15 && std::abs(kept.row[3] - 2.0 / 3.0) <= 1e-15 &&
                       kept.row[1] == 0.0 && kept.row[2] == 0.0;
  const auto collapsed = apply_synthesis(std::vector<double>{0.1, 0.35, 0.0, 0.55}, amino);
  const bool collapsed_ok = collapsed.row == std::vector<double>{0.0, 0.0, 0.0, 1.0};

  report(6, amino_bad == 0 && metal_bad == 0 && kept_ok && collapsed_ok, "synthesis constraints",
         "amino violations " + std::to_string(amino_bad) + "/10000, metal violations " + std::to_string(metal_bad) +
             "/10000, MEL+CS kept " + (kept_ok ? "yes" : "no") + ", MEL+BN collapsed " + (collapsed_ok ? "yes" : "no"));
}

void nine_dim_pipeline() {
  const ProblemSpec spec = load_problem_config(data_path("case9d.json"));
  const auto data = load_experiment_csv(data_path("case9d_experiments.csv"), spec);
  const auto subs = effective_subproblems(spec);
  const auto& main = subs[main_subproblem_index(subs)];
  const SynthesisConstraint amino = *subs[1].synthesis;
  constexpr std::size_t kNineSeeds = 20;

  std::size_t violations = 0;
  std::size_t rows = 0;
  std::size_t wd_hits[2] = {0, 0};
  std::size_t cd_hits[2] = {0, 0};
  for (std::size_t seed = 1; seed <= kNineSeeds; ++seed) {
    const auto result = run_pipeline(spec, data, options_for(seed));
    for (std::size_t e = 0; e < result.recommendations.size(); ++e) {
      const auto& rec = result.recommendations[e];
      if (rec.rows.rows() != 15) ++violations;
      for (Eigen::Index r = 0; r < rec.rows.rows(); ++r) {
        ++rows;
        std::vector<double> full(rec.rows.row(r).begin(), rec.rows.row(r).end());
        bool ok = std::llround(row_sum(rec.rows, r) * 1000.0) == 1000;
        const double amino_mass = full[2] + full[3] + full[4] + full[5];
        const double metal_mass = full[6] + full[7] + full[8];
        ok = ok && main.aggregates[0].contains(amino_mass, 1e-9) && main.aggregates[1].contains(metal_mass, 1e-9);
        ok = ok && (full[6] > 0) + (full[7] > 0) + (full[8] > 0) <= 1;
        const std::vector<double> amino_part(full.begin() + 2, full.begin() + 6);
        ok = ok && (amino_mass == 0.0 || support_allowed(amino_part, amino));
        if (!ok) ++violations;
      }
      if (rec.metrics) {
        const auto& [selected, with_data, pool] = *rec.metrics;
        wd_hits[e] += pool.wd < selected.wd && selected.wd < with_data.wd;
        cd_hits[e] += selected.cd < with_data.cd;
      }
    }
  }
  const std::size_t need = (kNineSeeds * 8 + 9) / 10;
  const bool pass = violations == 0 && wd_hits[0] >= need && wd_hits[1] >= need && cd_hits[0] >= need &&
                    cd_hits[1] >= need;
  report(7, pass, "9-D pipeline recommendations",
         std::to_string(violations) + " violations in " + std::to_string(rows) + " rows over 20 seeds; WD pool<15<15+data lhs " +
             fraction(wd_hits[0], kNineSeeds) + ", lhsmdu " + fraction(wd_hits[1], kNineSeeds) + "; CD 15<15+data lhs " +
             fraction(cd_hits[0], kNineSeeds) + ", lhsmdu " + fraction(cd_hits[1], kNineSeeds));
}

std::string run_outputs(const ProblemSpec& spec, const ExperimentDataset& data, std::uint64_t seed, unsigned threads) {
  const RunOptions options = options_for(seed, threads);
  const auto result = run_pipeline(spec, data, options);
  const auto names = spec.component_names();
  std::string out;
  for (const auto& rec : result.recommendations) {
    out += format_csv(rec.rows, names, spec.rounding_decimals);
    out += format_csv(rec.working_pool, names, 12);
  }
  out += build_manifest(spec, options, result, data.size()).dump(2);
  return out;
}

void determinism() {
  std::size_t mismatches = 0;
  std::size_t compared = 0;
  for (const char* name : {"case4d", "case9d"}) {
    const ProblemSpec spec = load_problem_config(data_path(std::string(name) + ".json"));
    const auto data = load_experiment_csv(data_path(std::string(name) + "_experiments.csv"), spec);
    for (std::uint64_t seed : {11u, 12u, 13u}) {
      const auto first = run_outputs(spec, data, seed, 1);
      const auto second = run_outputs(spec, data, seed, 1);
      const auto threaded = run_outputs(spec, data, seed, 8);
      mismatches += first != second;
      mismatches += first != threaded;
      compared += 2;
    }
  }
  report(8, mismatches == 0, "byte-identical outputs across runs and thread counts",
         std::to_string(mismatches) + " mismatches in " + std::to_string(compared) + " comparisons");
}

}  // namespace

int main() {
  try {
    const ProblemSpec four = load_problem_config(data_path("case4d.json"));
    const auto four_data = load_experiment_csv(data_path("case4d_experiments.csv"), four);
    const auto runs = run_four_dim(four, four_data);
    feasibility(four, runs);
    yields(runs);
    metric_ordering(runs);
    discrepancy_oracles();
    pairing();
    synthesis();
    nine_dim_pipeline();
    determinism();
  } catch (const std::exception& e) {
    std::printf("FAIL acceptance run aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
