#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "castro/bounds.hpp"
#include "castro/lhs.hpp"
#include "castro/matrix.hpp"
#include "castro/rng.hpp"

namespace castro {

struct SamplerConfig {
  std::size_t tot_samp = 0;
  std::size_t n_samp = 0;  // per permutation
  std::size_t max_rej = 0;
  std::size_t max_iter_dim2 = 100;
  std::size_t max_iter_dim3 = 100;
  Engine engine = Engine::Lhs;
  std::size_t oversample = 5;
};

// ceil(0.1 * n_samp)
std::size_t default_max_rej(std::size_t n_samp);

using IndexPair = std::pair<std::size_t, std::size_t>;

// Bookkeeping for pairing two sample vectors so that their sums stay
// feasible. left[j] is matched with right[j].
struct PairingState {
  enum class Rule {
    AtMostOne,          // a + b <= 1
    PositiveAtMostOne,  // 0 < a + b <= 1
  };

  Rule rule = Rule::AtMostOne;
  std::size_t left_count = 0;
  std::size_t right_count = 0;
  std::vector<double> sums;  // left_count x right_count, row-major
  std::vector<IndexPair> feasible_pairs;
  std::vector<std::size_t> left;
  std::vector<std::size_t> right;
  std::vector<std::size_t> left_unmatched;
  std::vector<std::size_t> right_unmatched;

  double sum(std::size_t i, std::size_t k) const { return sums[i * right_count + k]; }
  std::size_t matched() const { return left.size(); }
  std::size_t target() const { return std::min(left_count, right_count); }
  bool complete() const { return matched() == target(); }

  // Matched lists have equal length, hold no duplicates, every matched pair
  // is feasible, and matched/unmatched lists partition the index ranges.
  bool consistent() const;
};

// Builds the sum matrix and feasible pair list, then matches greedily in
// row-major order: (i, k) is taken when neither i nor k is matched yet.
PairingState build_pairing(std::span<const double> left_values, std::span<const double> right_values,
                           PairingState::Rule rule);

// Called after every mutation of the matched lists.
using PairingObserver = std::function<void(const PairingState&)>;

struct RepairStats {
  std::size_t installs = 0;
  std::size_t evictions = 0;
  bool aborted = false;
};

// Randomized repair pass for the first pairing stage. Each unmatched left
// index takes a uniformly chosen feasible partner; a partner that is already
// matched is evicted from its pair and its left index re-enters the queue.
// The pass aborts once more than two unmatched left indices have no feasible
// pair at all, and stops after n_samp evictions.
RepairStats repair_pairing(PairingState& state, std::size_t n_samp, RngStream& rng,
                           const PairingObserver& observer = {});

// Repair pass for the dimension > 3 stage. Aborts up front when more than
// max_rej - 1 unmatched left indices have no feasible pair (max_rej > 0), and
// stops once counter_pair reaches n_samp evictions.
RepairStats repair_pairing_gt3(PairingState& state, std::size_t n_samp, std::size_t max_rej,
                               RngStream& rng, const PairingObserver& observer = {});

enum class SampleStatus {
  Ok,
  RejectionOverflow,  // caps exhausted below n_samp - max_rej; the last draw's matched rows are kept
  Infeasible,         // no row could be matched
  NoFeasibleMixture,  // bounds exclude every composition (dimension 1)
};

std::string_view status_name(SampleStatus status);

// Rows of one permutation's draw, columns in the permuted order.
struct ConditionedSampleSet {
  SampleMatrix rows;
  std::size_t pairing_rejected = 0;  // rows lost while pairing
  std::size_t bound_rejected = 0;    // rows removed by the last-component bound check
  std::vector<std::size_t> sum_infeasible_rows;  // dimension 1 only
  SampleStatus status = SampleStatus::Ok;
  std::string diagnostic;

  std::size_t accepted() const { return static_cast<std::size_t>(rows.rows()); }
};

struct PairedSamples {
  std::vector<double> first;
  std::vector<double> second;
  std::vector<double> sum_vec;  // first + second, elementwise
  PairingState state;
  std::size_t rejected = 0;
  std::size_t iterations = 0;
  bool feasible = false;
  std::string diagnostic;
};

struct TripleSamples {
  std::vector<double> first;
  std::vector<double> second;
  std::vector<double> third;
  PairingState state;
  std::size_t rejected = 0;  // total against n_samp
  std::size_t iterations = 0;
  bool feasible = false;
  std::string diagnostic;
};

// Draws n_samp values of one component, scaled to its bounds.
std::vector<double> draw_component(const ComponentBounds& bounds, const SamplerConfig& cfg, RngStream& rng);

ConditionedSampleSet sample_dim1(std::span<const ComponentBounds> bounds, const SamplerConfig& cfg,
                                 RngStream& rng);

ConditionedSampleSet sample_dim2(std::span<const ComponentBounds> bounds, const SamplerConfig& cfg,
                                 RngStream& rng);

// One pairing attempt on given draws: greedy matching, a repair pass when the
// matching is incomplete, then acceptance when at least n_samp - max_rej
// pairs are matched.
PairedSamples pair_samples(std::span<const double> sample1, std::span<const double> sample2,
                           const SamplerConfig& cfg, RngStream& rng, const PairingObserver& observer = {});

// Pairs sum_vec with given sample3 values under 0 < sum <= 1; same
// acceptance rule as pair_samples, counted against n_samp.
TripleSamples pair_with_third(const PairedSamples& paired, std::span<const double> sample3,
                              const SamplerConfig& cfg, RngStream& rng, const PairingObserver& observer = {});

// First pairing stage for d >= 3: draws sample1 and sample2, pairs them with
// sums <= 1, repairs a stalled matching and redraws until at least
// n_samp - max_rej pairs are matched or max_iter_dim2 draws are used. In the
// latter case the last draw's partial matching is returned with feasible unset.
PairedSamples sample_dim_gt2(std::span<const ComponentBounds> bounds, const SamplerConfig& cfg,
                             RngStream& rng, const PairingObserver& observer = {});

// Second pairing stage for d >= 4: pairs sum_vec with a fresh sample3 under
// 0 < sum <= 1, redrawing sample3 up to max_iter_dim3 times. The rows of
// sample1/sample2 follow the left indices; sample3 follows the right indices.
TripleSamples extend_dim_gt3(const PairedSamples& paired, std::span<const ComponentBounds> bounds,
                             const SamplerConfig& cfg, RngStream& rng,
                             const PairingObserver& observer = {});

// Appends last = 1 - sum(row) to each partial row and drops rows whose last
// value falls outside last_bounds.
ConditionedSampleSet finalize_last_component(const SampleMatrix& partial_rows,
                                             const ComponentBounds& last_bounds);

// Dispatches on the dimension (1 to 4) and returns feasible rows in the
// order of `bounds`.
ConditionedSampleSet sample_conditioned(std::span<const ComponentBounds> bounds, const SamplerConfig& cfg,
                                        RngStream& rng);

}  // namespace castro
