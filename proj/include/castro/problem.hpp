#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "castro/bounds.hpp"
#include "castro/matrix.hpp"

namespace castro {

// Which components of a group may co-occur in a synthesizable composition.
// Indices are local to the owning group's member list.
struct SynthesisConstraint {
  enum class Mode { Pairs, OneHot };

  Mode mode = Mode::OneHot;
  std::vector<std::pair<std::size_t, std::size_t>> allowed_pairs;  // stored with first < second
  std::vector<std::size_t> allowed_singles;                        // sorted

  bool pair_allowed(std::size_t a, std::size_t b) const;
  bool single_allowed(std::size_t a) const;

  friend bool operator==(const SynthesisConstraint&, const SynthesisConstraint&) = default;
};

struct SubproblemSpec {
  enum class Kind { Main, Group };

  Kind kind = Kind::Main;
  std::string name;
  // Indices into ProblemSpec::components.
  std::vector<std::size_t> member_indices;
  // Main only: the aggregate slots that stand in for whole groups. They follow
  // the members in the main problem's column order.
  std::vector<ComponentBounds> aggregates;
  // Group only: the main-problem column this group collapses to.
  std::optional<std::size_t> aggregate_slot;
  std::optional<SynthesisConstraint> synthesis;
  // Per-subproblem sampling budget; falls back to SamplerSettings::tot_samp.
  std::optional<std::size_t> tot_samp;

  std::size_t dimension() const { return member_indices.size() + aggregates.size(); }

  friend bool operator==(const SubproblemSpec&, const SubproblemSpec&) = default;
};

// Defaults for the sampling pipeline. Command-line flags override them.
struct SamplerSettings {
  std::size_t tot_samp = 144;
  std::optional<std::size_t> max_rej;
  std::size_t max_iter_dim2 = 100;
  std::size_t max_iter_dim3 = 100;
  std::size_t oversample = 5;
  std::size_t pool_size = 90;
  bool all_select = true;
  std::size_t num_select = 0;
  std::optional<double> min_mutual;
  std::uint64_t seed = 0;

  friend bool operator==(const SamplerSettings&, const SamplerSettings&) = default;
};

struct ProblemSpec {
  std::vector<ComponentBounds> components;
  std::vector<SubproblemSpec> partition;  // empty: the whole problem is the main problem
  std::size_t budget = 15;                // des_n_samp
  int rounding_decimals = 3;
  SamplerSettings sampler;

  std::size_t dimension() const { return components.size(); }
  std::optional<std::size_t> component_index(std::string_view name) const;
  std::vector<std::string> component_names() const;

  friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;
};

// Subproblems as the orchestrator runs them: the explicit partition, or a
// single main subproblem covering every component.
std::vector<SubproblemSpec> effective_subproblems(const ProblemSpec& spec);

// Index of the main subproblem within effective_subproblems().
std::size_t main_subproblem_index(const std::vector<SubproblemSpec>& subs);

// Bounds of the subproblem's own columns (members, then aggregates).
std::vector<ComponentBounds> subproblem_bounds(const ProblemSpec& spec, const SubproblemSpec& sub);

// Bounds of every component in the full problem. Group members are scaled by
// their aggregate's bounds.
std::vector<ComponentBounds> full_bounds(const ProblemSpec& spec);

// Throws ConfigError / InfeasibleError when an invariant is violated.
void validate_problem(const ProblemSpec& spec);

ProblemSpec parse_problem_config(std::string_view text);
std::string serialize_problem_config(const ProblemSpec& spec);
ProblemSpec load_problem_config(const std::string& path);

// Previously collected experiments, columns in ProblemSpec component order.
struct ExperimentDataset {
  SampleMatrix rows;
  std::vector<std::string> columns;
  // Rows kept for distance calculations although they leave the current bounds.
  std::vector<std::size_t> out_of_bounds_rows;
  // Rows rescaled to sum to one (lenient loading only).
  std::vector<std::size_t> renormalized_rows;

  std::size_t size() const { return static_cast<std::size_t>(rows.rows()); }
  bool empty() const { return rows.rows() == 0; }
};

struct LoadOptions {
  double sum_tolerance = 1e-6;
  bool lenient = false;  // renormalize rows instead of rejecting them
};

ExperimentDataset empty_dataset(const ProblemSpec& spec);

ExperimentDataset parse_experiment_csv(std::string_view text, const ProblemSpec& spec,
                                       const LoadOptions& options = {},
                                       std::string_view source = "<memory>");
ExperimentDataset load_experiment_csv(const std::string& path, const ProblemSpec& spec,
                                      const LoadOptions& options = {});

// Restricts each row to the subproblem's columns (aggregates are summed over
// their group) and divides by the row's total. Rows with zero mass in the
// subproblem are dropped.
ExperimentDataset rescale_dataset_to_subproblem(const ExperimentDataset& data, const ProblemSpec& spec,
                                                const SubproblemSpec& sub);

}  // namespace castro
