#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "castro/bounds.hpp"
#include "castro/conditioned.hpp"
#include "castro/lhs.hpp"
#include "castro/matrix.hpp"
#include "castro/rng.hpp"

namespace castro {

inline constexpr std::size_t kMaxPermutedDimension = 4;

struct PermutationPlan {
  std::vector<std::vector<std::size_t>> all_perms;  // lexicographic, identity first
  std::size_t per_perm_n_samp = 0;
};

// All d! orderings of the component indices. Throws DomainError for d > 4.
PermutationPlan enumerate_bound_permutations(std::size_t d);

// Writes column num of `samples` to column combi[num], restoring the
// original component order.
SampleMatrix reorder_columns(const SampleMatrix& samples, std::span<const std::size_t> combi);

struct PermutationReport {
  std::size_t perm_index = 0;
  SampleStatus status = SampleStatus::Ok;
  std::size_t accepted = 0;  // rows stacked into the pool
  std::size_t pairing_rejected = 0;
  std::size_t bound_rejected = 0;
  std::string diagnostic;
};

struct EnginePool {
  Engine engine = Engine::Lhs;
  SampleMatrix samples;  // original component order
  std::vector<PermutationReport> per_perm;

  std::vector<std::size_t> per_perm_counts() const;
};

struct FeasiblePool {
  std::vector<EnginePool> pools;  // one per requested engine, in request order
  std::size_t n_samp = 0;
  std::size_t max_rej = 0;
  std::vector<std::string> warnings;

  const EnginePool& pool(Engine engine) const;
};

struct DriverOptions {
  std::vector<Engine> engines{Engine::Lhs, Engine::Lhsmdu};
  bool all_select = true;
  std::size_t num_select = 0;
  unsigned threads = 1;
  // Unset means ceil(0.1 * n_samp).
  std::optional<std::size_t> max_rej;
};

// Runs the conditioned sampler for every engine and every bound permutation,
// restores the column order and stacks the feasible rows. Permutation p of
// engine e draws from rng.child(e).child(p). The cfg's n_samp and max_rej are
// derived from cfg.tot_samp and options.
FeasiblePool run_all_permutations(std::span<const ComponentBounds> bounds, const SamplerConfig& cfg,
                                  const RngStream& rng, const DriverOptions& options = {});

// Greedily moves num_select rows of `fresh` into the pool, each time picking
// the row farthest from its nearest pool row. Returns the pool with the picks
// appended.
SampleMatrix select_by_distance_incremental(const SampleMatrix& pool, const SampleMatrix& fresh,
                                            std::size_t num_select);

}  // namespace castro
