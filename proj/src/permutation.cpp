#include "castro/permutation.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "castro/error.hpp"
#include "castro/parallel.hpp"
#include "castro/selection.hpp"

namespace castro {

std::vector<std::size_t> EnginePool::per_perm_counts() const {
  std::vector<std::size_t> out;
  out.reserve(per_perm.size());
  for (const auto& r : per_perm) out.push_back(r.accepted);
  return out;
}

const EnginePool& FeasiblePool::pool(Engine engine) const {
  for (const auto& p : pools) {
    if (p.engine == engine) return p;
  }
  throw DomainError("feasible pool has no rows for engine '" + std::string(engine_name(engine)) + "'");
}

PermutationPlan enumerate_bound_permutations(std::size_t d) {
  if (d == 0) throw DomainError("permutations need at least one component");
  if (d > kMaxPermutedDimension) {
    throw DomainError("bound permutations are limited to 4 components (got " + std::to_string(d) +
                      "); partition the problem into subproblems first");
  }
  PermutationPlan plan;
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  do {
    plan.all_perms.push_back(order);
  } while (std::next_permutation(order.begin(), order.end()));
  return plan;
}

SampleMatrix reorder_columns(const SampleMatrix& samples, std::span<const std::size_t> combi) {
  if (static_cast<std::size_t>(samples.cols()) != combi.size()) {
    throw DomainError("reorder_columns: ordering length does not match column count");
  }
  SampleMatrix out(samples.rows(), samples.cols());
  for (std::size_t num = 0; num < combi.size(); ++num) {
    out.col(static_cast<Eigen::Index>(combi[num])) = samples.col(static_cast<Eigen::Index>(num));
  }
  return out;
}

SampleMatrix select_by_distance_incremental(const SampleMatrix& pool, const SampleMatrix& fresh,
                                            std::size_t num_select) {
  if (pool.rows() > 0 && pool.cols() != fresh.cols()) throw DomainError("select_by_distance: dimension mismatch");
  const auto n = static_cast<std::size_t>(fresh.rows());
  num_select = std::min(num_select, n);

  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  if (pool.rows() > 0) {
    const Eigen::MatrixXd d = distance_matrix(fresh, pool);
    for (std::size_t i = 0; i < n; ++i) nearest[i] = d.row(static_cast<Eigen::Index>(i)).minCoeff();
  }
  std::vector<bool> taken(n, false);
  std::vector<std::size_t> picks;
  for (std::size_t s = 0; s < num_select; ++s) {
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!taken[i] && (best == n || nearest[i] > nearest[best])) best = i;
    }
    taken[best] = true;
    picks.push_back(best);
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i]) continue;
      const double dist = (fresh.row(static_cast<Eigen::Index>(i)) - fresh.row(static_cast<Eigen::Index>(best))).norm();
      nearest[i] = std::min(nearest[i], dist);
    }
  }
  return vstack(pool, take_rows(fresh, picks));
}

FeasiblePool run_all_permutations(std::span<const ComponentBounds> bounds, const SamplerConfig& cfg,
                                  const RngStream& rng, const DriverOptions& options) {
  const std::size_t d = bounds.size();
  PermutationPlan plan = enumerate_bound_permutations(d);
  const std::size_t perms = plan.all_perms.size();

  FeasiblePool result;
  if (cfg.tot_samp < perms) {
    throw ConfigError("tot_samp " + std::to_string(cfg.tot_samp) + " is smaller than the " + std::to_string(perms) +
                      " bound permutations");
  }
  if (cfg.tot_samp % perms != 0) {
    result.warnings.push_back("tot_samp " + std::to_string(cfg.tot_samp) + " is not divisible by " +
                              std::to_string(perms) + " permutations; using " + std::to_string(cfg.tot_samp / perms) +
                              " samples per permutation");
  }
  SamplerConfig run_cfg = cfg;
  run_cfg.n_samp = cfg.tot_samp / perms;
  run_cfg.max_rej = options.max_rej.value_or(default_max_rej(run_cfg.n_samp));
  if (run_cfg.max_rej >= run_cfg.n_samp) {
    throw ConfigError("max_rej " + std::to_string(run_cfg.max_rej) + " must be smaller than n_samp " +
                      std::to_string(run_cfg.n_samp));
  }
  plan.per_perm_n_samp = run_cfg.n_samp;
  result.n_samp = run_cfg.n_samp;
  result.max_rej = run_cfg.max_rej;

  for (Engine engine : options.engines) {
    SamplerConfig engine_cfg = run_cfg;
    engine_cfg.engine = engine;
    const RngStream engine_rng = rng.child(static_cast<std::uint64_t>(engine));

    std::vector<ConditionedSampleSet> sets(perms);
    parallel_for(perms, options.threads, [&](std::size_t p) {
      RngStream stream = engine_rng.child(p);
      const auto permuted = permute_bounds(bounds, plan.all_perms[p]);
      sets[p] = sample_conditioned(permuted, engine_cfg, stream);
    });

    EnginePool pool;
    pool.engine = engine;
    pool.samples = SampleMatrix(0, static_cast<Eigen::Index>(d));
    for (std::size_t p = 0; p < perms; ++p) {
      const auto& set = sets[p];
      SampleMatrix rows = set.rows;
      if (!set.sum_infeasible_rows.empty()) {
        std::vector<std::size_t> keep;
        for (std::size_t r = 0; r < static_cast<std::size_t>(rows.rows()); ++r) {
          if (!std::binary_search(set.sum_infeasible_rows.begin(), set.sum_infeasible_rows.end(), r)) keep.push_back(r);
        }
        rows = take_rows(rows, keep);
      }
      SampleMatrix ordered = reorder_columns(rows, plan.all_perms[p]);

      const auto before = pool.samples.rows();
      if (options.all_select || p == 0) {
        pool.samples = vstack(pool.samples, ordered);
      } else {
        pool.samples = select_by_distance_incremental(pool.samples, ordered, options.num_select);
      }

      PermutationReport report;
      report.perm_index = p;
      report.status = set.status;
      report.accepted = static_cast<std::size_t>(pool.samples.rows() - before);
      report.pairing_rejected = set.pairing_rejected;
      report.bound_rejected = set.bound_rejected;
      report.diagnostic = set.diagnostic;
      pool.per_perm.push_back(std::move(report));
    }
    if (pool.samples.rows() == 0) {
      throw InfeasibleError("no feasible samples for engine '" + std::string(engine_name(engine)) + "' across " +
                            std::to_string(perms) + " bound permutations" +
                            (sets.empty() || sets.back().diagnostic.empty() ? "" : ": " + sets.back().diagnostic));
    }
    result.pools.push_back(std::move(pool));
  }
  return result;
}

}  // namespace castro
