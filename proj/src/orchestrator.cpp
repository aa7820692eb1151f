#include "castro/orchestrator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "castro/error.hpp"
#include "castro/rng.hpp"
#include "castro/selection.hpp"

namespace castro {
namespace {

// Child stream tags below a subproblem's stream.
constexpr std::uint64_t kDriverStream = 0;
constexpr std::uint64_t kShortlistStream = 1;

std::vector<std::size_t> group_subproblems(const std::vector<SubproblemSpec>& subs) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (subs[i].kind == SubproblemSpec::Kind::Group) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> iota_rows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

// A one-component group can only hold the value 1.
FeasiblePool single_component_pool(std::size_t rows, const std::vector<Engine>& engines) {
  FeasiblePool pool;
  pool.n_samp = rows;
  for (Engine e : engines) pool.pools.push_back({e, SampleMatrix::Ones(static_cast<Eigen::Index>(rows), 1), {}});
  return pool;
}

}  // namespace

const EngineShortlist& SubproblemResult::engine(Engine e) const {
  for (const auto& s : engines) {
    if (s.engine == e) return s;
  }
  throw DomainError("subproblem '" + name + "' did not run engine '" + std::string(engine_name(e)) + "'");
}

const DesignRecommendation& PipelineResult::recommendation(Engine e) const {
  for (const auto& r : recommendations) {
    if (r.engine == e) return r;
  }
  throw DomainError("no recommendation for engine '" + std::string(engine_name(e)) + "'");
}

SubproblemResult run_subproblem(const ProblemSpec& spec, std::size_t sub_index, const ExperimentDataset& data,
                                const RunOptions& options, std::size_t shortlist_size) {
  const auto subs = effective_subproblems(spec);
  if (sub_index >= subs.size()) throw DomainError("subproblem index out of range");
  const SubproblemSpec& sub = subs[sub_index];
  if (sub.dimension() > kMaxPermutedDimension) {
    throw ConfigError("subproblem '" + sub.name + "' has dimension " + std::to_string(sub.dimension()) +
                      "; partition it into pieces of at most " + std::to_string(kMaxPermutedDimension));
  }

  const auto bounds = subproblem_bounds(spec, sub);
  const ExperimentDataset local = rescale_dataset_to_subproblem(data, spec, sub);

  SamplerConfig cfg;
  cfg.tot_samp = sub.tot_samp.value_or(spec.sampler.tot_samp);
  cfg.max_iter_dim2 = spec.sampler.max_iter_dim2;
  cfg.max_iter_dim3 = spec.sampler.max_iter_dim3;
  cfg.oversample = spec.sampler.oversample;

  DriverOptions driver;
  driver.engines = options.engines;
  driver.all_select = spec.sampler.all_select;
  driver.num_select = spec.sampler.num_select;
  driver.threads = options.threads;
  driver.max_rej = spec.sampler.max_rej;

  const RngStream stream = RngStream(options.seed).child(sub_index);
  const FeasiblePool feasible = sub.dimension() == 1 ? single_component_pool(cfg.tot_samp, options.engines)
                                                     : run_all_permutations(bounds, cfg, stream.child(kDriverStream), driver);

  SubproblemResult result;
  result.index = sub_index;
  result.name = sub.name;
  result.kind = sub.kind;
  result.tot_samp = cfg.tot_samp;
  result.n_samp = feasible.n_samp;
  result.max_rej = feasible.max_rej;
  result.warnings = feasible.warnings;

  for (const auto& engine_pool : feasible.pools) {
    EngineShortlist entry;
    entry.engine = engine_pool.engine;
    entry.per_perm = engine_pool.per_perm;
    entry.raw_pool_size = static_cast<std::size_t>(engine_pool.samples.rows());

    if (sub.synthesis) {
      SynthesisPass pass = apply_synthesis_to_pool(engine_pool.samples, *sub.synthesis);
      entry.pool = std::move(pass.rows);
      entry.pool_source_rows = std::move(pass.source_rows);
      entry.synthesis_rejected = pass.rejected;
      if (pass.rejected > 0) {
        result.warnings.push_back(std::string(engine_name(entry.engine)) + ": synthesis post-processing rejected " +
                                  std::to_string(pass.rejected) + " rows");
      }
    } else {
      entry.pool = engine_pool.samples;
      entry.pool_source_rows = iota_rows(entry.raw_pool_size);
    }

    const auto available = static_cast<std::size_t>(entry.pool.rows());
    if (available == 0) {
      throw InfeasibleError("subproblem '" + sub.name + "', engine '" + std::string(engine_name(entry.engine)) +
                            "': empty pool after post-processing");
    }
    const std::size_t k = std::min(shortlist_size, available);
    if (k < shortlist_size) {
      result.warnings.push_back("subproblem '" + sub.name + "', engine '" + std::string(engine_name(entry.engine)) +
                                "': shortlist of " + std::to_string(k) + " rows, " + std::to_string(shortlist_size) +
                                " requested");
    }

    RngStream shuffle_rng = stream.child(kShortlistStream).child(static_cast<std::uint64_t>(entry.engine));
    if (sub.synthesis) {
      // Random subset of the post-processed pool.
      std::vector<std::size_t> order = iota_rows(available);
      shuffle_rng.shuffle(std::span<std::size_t>(order));
      order.resize(k);
      entry.shortlist_rows = std::move(order);
    } else {
      Selection picked = farthest_from_data(entry.pool, local.rows, k, spec.sampler.min_mutual);
      if (picked.shortfall) result.warnings.push_back("subproblem '" + sub.name + "': " + picked.warning);
      entry.shortlist_rows = std::move(picked.indices);
      // Group rows are shuffled so the index-zip with the main shortlist does
      // not pair rows by their distance rank.
      if (sub.kind == SubproblemSpec::Kind::Group) {
        shuffle_rng.shuffle(std::span<std::size_t>(entry.shortlist_rows));
      }
    }
    entry.shortlist = take_rows(entry.pool, entry.shortlist_rows);
    result.engines.push_back(std::move(entry));
  }
  return result;
}

SampleMatrix reassemble(const SampleMatrix& main_rows, std::span<const SampleMatrix> group_rows,
                        const ProblemSpec& spec) {
  const auto subs = effective_subproblems(spec);
  const SubproblemSpec& main = subs[main_subproblem_index(subs)];
  const auto groups = group_subproblems(subs);
  if (group_rows.size() != groups.size()) {
    throw DomainError("reassemble: " + std::to_string(group_rows.size()) + " group blocks for " +
                      std::to_string(groups.size()) + " groups");
  }
  if (static_cast<std::size_t>(main_rows.cols()) != main.dimension()) {
    throw DomainError("reassemble: main rows have " + std::to_string(main_rows.cols()) + " columns, expected " +
                      std::to_string(main.dimension()));
  }
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& sub = subs[groups[g]];
    if (group_rows[g].rows() != main_rows.rows()) {
      throw DomainError("reassemble: group '" + sub.name + "' has " + std::to_string(group_rows[g].rows()) +
                        " rows, main has " + std::to_string(main_rows.rows()));
    }
    if (static_cast<std::size_t>(group_rows[g].cols()) != sub.member_indices.size()) {
      throw DomainError("reassemble: group '" + sub.name + "' column count mismatch");
    }
  }

  SampleMatrix full = SampleMatrix::Zero(main_rows.rows(), static_cast<Eigen::Index>(spec.dimension()));
  for (Eigen::Index r = 0; r < main_rows.rows(); ++r) {
    for (std::size_t j = 0; j < main.member_indices.size(); ++j) {
      full(r, static_cast<Eigen::Index>(main.member_indices[j])) = main_rows(r, static_cast<Eigen::Index>(j));
    }
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const auto& sub = subs[groups[g]];
      const double aggregate = main_rows(r, static_cast<Eigen::Index>(*sub.aggregate_slot));
      for (std::size_t k = 0; k < sub.member_indices.size(); ++k) {
        full(r, static_cast<Eigen::Index>(sub.member_indices[k])) =
            aggregate * group_rows[g](r, static_cast<Eigen::Index>(k));
      }
    }
  }
  return full;
}

std::string validate_recommendation_row(std::span<const double> row, const ProblemSpec& spec, double sum_tol,
                                        double bound_tol) {
  if (row.size() != spec.dimension()) return "wrong number of components";
  double total = 0.0;
  for (double v : row) total += v;
  if (!(std::abs(total - 1.0) <= sum_tol)) return "components sum to " + std::to_string(total);

  const auto bounds = full_bounds(spec);
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (!bounds[i].contains(row[i], bound_tol)) {
      return "'" + bounds[i].name + "' = " + std::to_string(row[i]) + " outside [" + std::to_string(bounds[i].lower) +
             ", " + std::to_string(bounds[i].upper) + "]";
    }
  }

  const auto subs = effective_subproblems(spec);
  const SubproblemSpec& main = subs[main_subproblem_index(subs)];
  for (const auto& sub : subs) {
    if (sub.kind != SubproblemSpec::Kind::Group) continue;
    const auto& agg = main.aggregates[*sub.aggregate_slot - main.member_indices.size()];
    std::vector<double> slice;
    double mass = 0.0;
    for (std::size_t idx : sub.member_indices) {
      slice.push_back(row[idx]);
      mass += row[idx];
    }
    if (!agg.contains(mass, bound_tol)) {
      return "group '" + sub.name + "' total " + std::to_string(mass) + " outside aggregate bounds [" +
             std::to_string(agg.lower) + ", " + std::to_string(agg.upper) + "]";
    }
    if (sub.synthesis && mass > 0.0 && !satisfies_synthesis(slice, *sub.synthesis)) {
      return "group '" + sub.name + "' support is not synthesizable";
    }
  }
  return {};
}

DesignRecommendation final_select(const SampleMatrix& candidates, const ExperimentDataset& data,
                                  const ProblemSpec& spec, std::size_t des_n_samp, int decimals) {
  const auto n = static_cast<std::size_t>(candidates.rows());
  if (n < des_n_samp) {
    throw InfeasibleError("final selection needs " + std::to_string(des_n_samp) + " candidates, only " +
                          std::to_string(n) + " available");
  }
  const auto bounds = full_bounds(spec);

  DesignRecommendation rec;
  rec.working_pool = candidates;

  // Candidates whose rounded form fails re-validation are dropped and the
  // selection is redone without them.
  std::set<std::size_t> excluded;
  while (true) {
    std::vector<std::size_t> usable;
    for (std::size_t i = 0; i < n; ++i) {
      if (!excluded.contains(i)) usable.push_back(i);
    }
    if (usable.size() < des_n_samp) break;
    const SampleMatrix pool = take_rows(candidates, usable);
    const Selection picked = farthest_from_data(pool, data.rows, des_n_samp, spec.sampler.min_mutual);
    if (picked.shortfall) rec.warnings.push_back(picked.warning);

    std::vector<std::size_t> chosen;
    for (std::size_t i : picked.indices) chosen.push_back(usable[i]);
    rec.raw_rows = take_rows(candidates, chosen);
    RoundedDesign rounded = round_and_renormalize(rec.raw_rows, decimals, bounds);
    rec.rows = std::move(rounded.rows);
    rec.provenance.clear();
    for (std::size_t c : chosen) rec.provenance.push_back({c, {}});

    rec.flagged.clear();
    const double sum_tol = 1e-9;
    for (Eigen::Index r = 0; r < rec.rows.rows(); ++r) {
      const auto row = row_vector(rec.rows, r);
      if (!validate_recommendation_row(row, spec, sum_tol, 1e-9).empty()) {
        rec.flagged.push_back(static_cast<std::size_t>(r));
      }
    }
    if (rec.flagged.empty()) break;
    for (std::size_t r : rec.flagged) excluded.insert(chosen[r]);
  }
  if (!rec.flagged.empty()) {
    rec.warnings.push_back(std::to_string(rec.flagged.size()) + " recommendation rows fail re-validation after rounding");
  }
  if (!excluded.empty()) {
    rec.warnings.push_back(std::to_string(excluded.size()) +
                           " candidates dropped because their rounded form failed re-validation");
  }

  try {
    rec.metrics = metrics_table(rec.rows, data.rows, candidates, bounds);
  } catch (const DomainError& e) {
    rec.metrics_error = e.what();
  }
  return rec;
}

PipelineResult run_pipeline(const ProblemSpec& spec, const ExperimentDataset& data, const RunOptions& options) {
  validate_problem(spec);
  if (options.engines.empty()) throw ConfigError("no sampling engine requested");
  const auto subs = effective_subproblems(spec);
  const std::size_t main_index = main_subproblem_index(subs);
  const auto groups = group_subproblems(subs);

  PipelineResult result;
  for (std::size_t i = 0; i < subs.size(); ++i) {
    result.subproblems.push_back(run_subproblem(spec, i, data, options, spec.sampler.pool_size));
    for (const auto& w : result.subproblems.back().warnings) result.warnings.push_back(w);
  }

  // Shortlists are zipped by index, so they are cut to a common length.
  std::size_t working = spec.sampler.pool_size;
  for (const auto& sub : result.subproblems) {
    for (const auto& e : sub.engines) working = std::min(working, static_cast<std::size_t>(e.shortlist.rows()));
  }
  result.working_size = working;
  if (working < spec.sampler.pool_size) {
    result.warnings.push_back("working pool reduced to " + std::to_string(working) + " rows (requested " +
                              std::to_string(spec.sampler.pool_size) + ")");
  }

  for (Engine engine : options.engines) {
    const auto head = [&](std::size_t sub) { return result.subproblems[sub].engine(engine).shortlist.topRows(
                                                 static_cast<Eigen::Index>(working)); };
    const SampleMatrix main_rows = head(main_index);
    std::vector<SampleMatrix> group_rows;
    for (std::size_t g : groups) group_rows.emplace_back(head(g));
    const SampleMatrix candidates = reassemble(main_rows, group_rows, spec);

    DesignRecommendation rec = final_select(candidates, data, spec, spec.budget, spec.rounding_decimals);
    rec.engine = engine;
    for (auto& p : rec.provenance) {
      p.subproblem_rows.clear();
      for (const auto& sub : result.subproblems) p.subproblem_rows.push_back(sub.engine(engine).shortlist_rows[p.candidate]);
    }
    for (const auto& w : rec.warnings) result.warnings.push_back(std::string(engine_name(engine)) + ": " + w);
    result.recommendations.push_back(std::move(rec));
  }
  return result;
}

}  // namespace castro
