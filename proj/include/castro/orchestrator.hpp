#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "castro/lhs.hpp"
#include "castro/matrix.hpp"
#include "castro/metrics.hpp"
#include "castro/permutation.hpp"
#include "castro/problem.hpp"
#include "castro/synthesis.hpp"

namespace castro {

struct RunOptions {
  std::uint64_t seed = 0;
  std::vector<Engine> engines{Engine::Lhs, Engine::Lhsmdu};
  unsigned threads = 1;
};

struct EngineShortlist {
  Engine engine = Engine::Lhs;
  SampleMatrix pool;  // feasible rows, post-synthesis for constrained groups
  std::vector<std::size_t> pool_source_rows;  // row in the raw feasible pool
  std::vector<PermutationReport> per_perm;
  std::size_t raw_pool_size = 0;
  std::size_t synthesis_rejected = 0;
  SampleMatrix shortlist;
  std::vector<std::size_t> shortlist_rows;  // rows of `pool`, in shortlist order
};

struct SubproblemResult {
  std::size_t index = 0;
  std::string name;
  SubproblemSpec::Kind kind = SubproblemSpec::Kind::Main;
  std::size_t tot_samp = 0;
  std::size_t n_samp = 0;
  std::size_t max_rej = 0;
  std::vector<EngineShortlist> engines;
  std::vector<std::string> warnings;

  const EngineShortlist& engine(Engine e) const;
};

// Rescales the data to the subproblem, runs every bound permutation for each
// engine, applies synthesis post-processing and shortlists `shortlist_size`
// rows: farthest from the data for the main problem and unconstrained
// groups, a seeded random subset for synthesis-constrained groups.
SubproblemResult run_subproblem(const ProblemSpec& spec, std::size_t sub_index, const ExperimentDataset& data,
                                const RunOptions& options, std::size_t shortlist_size);

// Builds full-dimensional rows: main members copy through, each group's
// pattern is multiplied by its aggregate value. Rows are zipped by index.
SampleMatrix reassemble(const SampleMatrix& main_rows, std::span<const SampleMatrix> group_rows,
                        const ProblemSpec& spec);

struct RowProvenance {
  std::size_t candidate = 0;                // row in the working pool
  std::vector<std::size_t> subproblem_rows;  // per subproblem, row in its post-synthesis pool
};

struct DesignRecommendation {
  Engine engine = Engine::Lhs;
  SampleMatrix rows;  // rounded
  SampleMatrix raw_rows;
  std::vector<RowProvenance> provenance;
  std::vector<std::size_t> flagged;  // rows failing re-validation after rounding
  SampleMatrix working_pool;
  std::optional<MetricsTable> metrics;
  std::string metrics_error;
  std::vector<std::string> warnings;
};

// Picks des_n_samp candidates farthest from the data, rounds them and
// computes the three-scope metrics table.
DesignRecommendation final_select(const SampleMatrix& candidates, const ExperimentDataset& data,
                                  const ProblemSpec& spec, std::size_t des_n_samp, int decimals);

struct PipelineResult {
  std::vector<SubproblemResult> subproblems;
  std::vector<DesignRecommendation> recommendations;  // one per engine, in request order
  std::size_t working_size = 0;
  std::vector<std::string> warnings;

  const DesignRecommendation& recommendation(Engine e) const;
};

PipelineResult run_pipeline(const ProblemSpec& spec, const ExperimentDataset& data, const RunOptions& options);

// Independent re-validation of one full row: sum to one, component bounds,
// aggregate bounds and synthesis supports. Returns an empty string when valid.
std::string validate_recommendation_row(std::span<const double> row, const ProblemSpec& spec,
                                        double sum_tol, double bound_tol);

}  // namespace castro
