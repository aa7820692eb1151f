#include "castro/conditioned.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <sstream>

#include "castro/error.hpp"

namespace castro {
namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

bool pair_feasible(double s, PairingState::Rule rule) {
  return s <= 1.0 && (rule == PairingState::Rule::AtMostOne || s > 0.0);
}

std::size_t position_of(const std::vector<std::size_t>& v, std::size_t value) {
  const auto it = std::find(v.begin(), v.end(), value);
  return it == v.end() ? kNone : static_cast<std::size_t>(it - v.begin());
}

void erase_value(std::vector<std::size_t>& v, std::size_t value) {
  const auto it = std::find(v.begin(), v.end(), value);
  if (it != v.end()) v.erase(it);
}

std::vector<std::vector<std::size_t>> partners_by_left(const PairingState& state) {
  std::vector<std::vector<std::size_t>> out(state.left_count);
  for (const auto& [i, k] : state.feasible_pairs) out[i].push_back(k);
  return out;
}

void notify(const PairingState& state, const PairingObserver& observer) {
  assert(state.consistent());
  if (observer) observer(state);
}

// Breaks the pair holding right index r; its left index becomes unmatched.
std::size_t evict_right(PairingState& state, std::size_t r, const PairingObserver& observer) {
  const std::size_t pos = position_of(state.right, r);
  const std::size_t evicted = state.left[pos];
  state.left.erase(state.left.begin() + static_cast<std::ptrdiff_t>(pos));
  state.right.erase(state.right.begin() + static_cast<std::ptrdiff_t>(pos));
  state.left_unmatched.push_back(evicted);
  state.right_unmatched.push_back(r);
  notify(state, observer);
  return evicted;
}

void install_pair(PairingState& state, std::size_t m, std::size_t r, const PairingObserver& observer) {
  erase_value(state.left_unmatched, m);
  erase_value(state.right_unmatched, r);
  state.left.push_back(m);
  state.right.push_back(r);
  notify(state, observer);
}

std::vector<double> gather(std::span<const double> values, const std::vector<std::size_t>& idx) {
  std::vector<double> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(values[i]);
  return out;
}

std::size_t rejection_floor(const SamplerConfig& cfg) {
  return cfg.n_samp > cfg.max_rej ? cfg.n_samp - cfg.max_rej : 0;
}

SampleMatrix columns_to_rows(std::initializer_list<const std::vector<double>*> columns) {
  const std::size_t m = (*columns.begin())->size();
  SampleMatrix out(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(columns.size()));
  Eigen::Index c = 0;
  for (const auto* col : columns) {
    for (std::size_t r = 0; r < m; ++r) out(static_cast<Eigen::Index>(r), c) = (*col)[r];
    ++c;
  }
  return out;
}

}  // namespace

std::size_t default_max_rej(std::size_t n_samp) {
  return (n_samp + 9) / 10;
}

bool PairingState::consistent() const {
  if (left.size() != right.size()) return false;
  if (sums.size() != left_count * right_count) return false;
  std::vector<int> lseen(left_count, 0);
  std::vector<int> rseen(right_count, 0);
  for (std::size_t j = 0; j < left.size(); ++j) {
    if (left[j] >= left_count || right[j] >= right_count) return false;
    if (lseen[left[j]]++ || rseen[right[j]]++) return false;
    if (!pair_feasible(sum(left[j], right[j]), rule)) return false;
  }
  for (std::size_t i : left_unmatched) {
    if (i >= left_count || lseen[i]++) return false;
  }
  for (std::size_t k : right_unmatched) {
    if (k >= right_count || rseen[k]++) return false;
  }
  return std::all_of(lseen.begin(), lseen.end(), [](int c) { return c == 1; }) &&
         std::all_of(rseen.begin(), rseen.end(), [](int c) { return c == 1; });
}

PairingState build_pairing(std::span<const double> left_values, std::span<const double> right_values,
                           PairingState::Rule rule) {
  PairingState state;
  state.rule = rule;
  state.left_count = left_values.size();
  state.right_count = right_values.size();
  state.sums.resize(state.left_count * state.right_count);
  std::vector<bool> left_used(state.left_count, false);
  std::vector<bool> right_used(state.right_count, false);
  for (std::size_t i = 0; i < state.left_count; ++i) {
    for (std::size_t k = 0; k < state.right_count; ++k) {
      const double s = left_values[i] + right_values[k];
      state.sums[i * state.right_count + k] = s;
      if (!pair_feasible(s, rule)) continue;
      state.feasible_pairs.emplace_back(i, k);
      if (!left_used[i] && !right_used[k]) {
        left_used[i] = right_used[k] = true;
        state.left.push_back(i);
        state.right.push_back(k);
      }
    }
  }
  for (std::size_t i = 0; i < state.left_count; ++i) {
    if (!left_used[i]) state.left_unmatched.push_back(i);
  }
  for (std::size_t k = 0; k < state.right_count; ++k) {
    if (!right_used[k]) state.right_unmatched.push_back(k);
  }
  return state;
}

RepairStats repair_pairing(PairingState& state, std::size_t n_samp, RngStream& rng, const PairingObserver& observer) {
  RepairStats stats;
  if (state.complete() || state.feasible_pairs.empty()) return stats;
  const auto partners = partners_by_left(state);

  std::vector<std::size_t> queue = state.left_unmatched;
  std::size_t without_pair = 0;
  for (std::size_t pos = 0; pos < queue.size() && !state.complete(); ++pos) {
    const std::size_t m = queue[pos];
    if (position_of(state.left, m) != kNone) continue;
    const auto& cands = partners[m];
    if (cands.empty()) {
      if (++without_pair > 2) {
        stats.aborted = true;
        break;
      }
      continue;
    }
    const std::size_t r = cands[rng.below(cands.size())];
    if (position_of(state.right, r) != kNone) {
      if (stats.evictions >= n_samp) break;
      queue.push_back(evict_right(state, r, observer));
      ++stats.evictions;
    }
    install_pair(state, m, r, observer);
    ++stats.installs;
  }
  return stats;
}

RepairStats repair_pairing_gt3(PairingState& state, std::size_t n_samp, std::size_t max_rej, RngStream& rng,
                               const PairingObserver& observer) {
  RepairStats stats;
  if (state.complete() || state.feasible_pairs.empty()) return stats;
  const auto partners = partners_by_left(state);

  const auto without_pair = static_cast<std::size_t>(
      std::count_if(state.left_unmatched.begin(), state.left_unmatched.end(),
                    [&](std::size_t m) { return partners[m].empty(); }));
  if (max_rej > 0 && without_pair > max_rej - 1) {
    stats.aborted = true;
    return stats;
  }

  std::vector<std::size_t> queue = state.left_unmatched;
  std::size_t counter_pair = 0;
  for (std::size_t pos = 0; pos < queue.size() && !state.complete(); ++pos) {
    if (counter_pair >= n_samp) break;
    const std::size_t m = queue[pos];
    if (position_of(state.left, m) != kNone) continue;
    const auto& cands = partners[m];
    if (cands.empty()) continue;
    const std::size_t r = cands[rng.below(cands.size())];
    if (position_of(state.right, r) != kNone) {
      queue.push_back(evict_right(state, r, observer));
      ++counter_pair;
      ++stats.evictions;
    }
    install_pair(state, m, r, observer);
    ++stats.installs;
  }
  return stats;
}

std::string_view status_name(SampleStatus status) {
  switch (status) {
    case SampleStatus::Ok: return "ok";
    case SampleStatus::RejectionOverflow: return "rejection_overflow";
    case SampleStatus::Infeasible: return "infeasible";
    case SampleStatus::NoFeasibleMixture: return "no_feasible_mixture";
  }
  return "unknown";
}

std::vector<double> draw_component(const ComponentBounds& bounds, const SamplerConfig& cfg, RngStream& rng) {
  const UnitDesign unit = draw_unit(cfg.engine, cfg.n_samp, 1, rng, cfg.oversample);
  std::vector<double> out(cfg.n_samp);
  for (std::size_t i = 0; i < cfg.n_samp; ++i) {
    out[i] = bounds.lower + unit.values(static_cast<Eigen::Index>(i), 0) * (bounds.upper - bounds.lower);
  }
  return out;
}

ConditionedSampleSet sample_dim1(std::span<const ComponentBounds> bounds, const SamplerConfig& cfg, RngStream& rng) {
  if (bounds.size() != 1) throw DomainError("sample_dim1 needs exactly one component");
  ConditionedSampleSet set;
  if (bounds[0].upper < 1.0) {
    set.rows = SampleMatrix(0, 1);
    set.status = SampleStatus::NoFeasibleMixture;
    set.diagnostic = "component '" + bounds[0].name + "' cannot reach 1, so no single-component mixture exists";
    return set;
  }
  const auto draws = draw_component(bounds[0], cfg, rng);
  set.rows = SampleMatrix(static_cast<Eigen::Index>(draws.size()), 1);
  for (std::size_t i = 0; i < draws.size(); ++i) {
    set.rows(static_cast<Eigen::Index>(i), 0) = draws[i];
    if (draws[i] != 1.0) set.sum_infeasible_rows.push_back(i);
  }
  if (!set.sum_infeasible_rows.empty()) {
    set.diagnostic = std::to_string(set.sum_infeasible_rows.size()) + " draw(s) differ from 1";
  }
  return set;
}

ConditionedSampleSet sample_dim2(std::span<const ComponentBounds> bounds, const SamplerConfig& cfg, RngStream& rng) {
  if (bounds.size() != 2) throw DomainError("sample_dim2 needs exactly two components");
  const auto first = draw_component(bounds[0], cfg, rng);
  std::vector<double> a;
  std::vector<double> b;
  for (double v : first) {
    const double complement = 1.0 - v;
    if (bounds[1].contains(complement)) {
      a.push_back(v);
      b.push_back(complement);
    }
  }
  ConditionedSampleSet set;
  set.rows = columns_to_rows({&a, &b});
  set.pairing_rejected = first.size() - a.size();
  if (a.size() < rejection_floor(cfg)) {
    set.status = SampleStatus::RejectionOverflow;
    set.diagnostic = "only " + std::to_string(a.size()) + " of " + std::to_string(cfg.n_samp) +
                     " complements satisfy the bounds of '" + bounds[1].name + "'";
  }
  return set;
}

PairedSamples pair_samples(std::span<const double> sample1, std::span<const double> sample2, const SamplerConfig& cfg,
                           RngStream& rng, const PairingObserver& observer) {
  PairedSamples out;
  out.state = build_pairing(sample1, sample2, PairingState::Rule::AtMostOne);
  notify(out.state, observer);
  if (!out.state.complete()) repair_pairing(out.state, cfg.n_samp, rng, observer);
  const std::size_t matched = out.state.matched();
  out.first = gather(sample1, out.state.left);
  out.second = gather(sample2, out.state.right);
  out.sum_vec.resize(matched);
  for (std::size_t i = 0; i < matched; ++i) out.sum_vec[i] = out.first[i] + out.second[i];
  out.rejected = cfg.n_samp > matched ? cfg.n_samp - matched : 0;
  out.feasible = matched > 0 && matched >= rejection_floor(cfg);
  if (!out.feasible) {
    out.diagnostic = "matched " + std::to_string(matched) + " of " + std::to_string(cfg.n_samp) + " pairs";
  }
  return out;
}

PairedSamples sample_dim_gt2(std::span<const ComponentBounds> bounds, const SamplerConfig& cfg, RngStream& rng,
                             const PairingObserver& observer) {
  if (bounds.size() < 3) throw DomainError("sample_dim_gt2 needs at least three components");
  PairedSamples last;
  for (std::size_t iter = 1; iter <= cfg.max_iter_dim2; ++iter) {
    const auto sample1 = draw_component(bounds[0], cfg, rng);
    const auto sample2 = draw_component(bounds[1], cfg, rng);
    last = pair_samples(sample1, sample2, cfg, rng, observer);
    last.iterations = iter;
    if (last.feasible) return last;
  }
  last.diagnostic = "pairing '" + bounds[0].name + "' with '" + bounds[1].name + "' stalled after " +
                    std::to_string(cfg.max_iter_dim2) + " draws (" + last.diagnostic + ")";
  return last;
}

TripleSamples pair_with_third(const PairedSamples& paired, std::span<const double> sample3, const SamplerConfig& cfg,
                              RngStream& rng, const PairingObserver& observer) {
  TripleSamples out;
  out.state = build_pairing(paired.sum_vec, sample3, PairingState::Rule::PositiveAtMostOne);
  notify(out.state, observer);
  if (!out.state.complete()) repair_pairing_gt3(out.state, cfg.n_samp, cfg.max_rej, rng, observer);
  const std::size_t matched = out.state.matched();
  out.first = gather(paired.first, out.state.left);
  out.second = gather(paired.second, out.state.left);
  out.third = gather(sample3, out.state.right);
  out.rejected = cfg.n_samp > matched ? cfg.n_samp - matched : 0;
  out.feasible = matched > 0 && matched >= rejection_floor(cfg);
  if (!out.feasible) {
    out.diagnostic = "matched " + std::to_string(matched) + " of " + std::to_string(cfg.n_samp) + " triples";
  }
  return out;
}

TripleSamples extend_dim_gt3(const PairedSamples& paired, std::span<const ComponentBounds> bounds,
                             const SamplerConfig& cfg, RngStream& rng, const PairingObserver& observer) {
  if (bounds.size() < 4) throw DomainError("extend_dim_gt3 needs at least four components");
  TripleSamples last;
  for (std::size_t iter = 1; iter <= cfg.max_iter_dim3; ++iter) {
    const auto sample3 = draw_component(bounds[2], cfg, rng);
    last = pair_with_third(paired, sample3, cfg, rng, observer);
    last.iterations = iter;
    if (last.feasible) return last;
  }
  last.diagnostic = "pairing with '" + bounds[2].name + "' stalled after " + std::to_string(cfg.max_iter_dim3) +
                    " draws (" + last.diagnostic + ")";
  return last;
}

ConditionedSampleSet finalize_last_component(const SampleMatrix& partial_rows, const ComponentBounds& last_bounds) {
  const Eigen::Index d = partial_rows.cols() + 1;
  std::vector<Eigen::Index> keep;
  std::vector<double> last_values;
  for (Eigen::Index r = 0; r < partial_rows.rows(); ++r) {
    const double last = 1.0 - row_sum(partial_rows, r);
    if (last_bounds.contains(last)) {
      keep.push_back(r);
      last_values.push_back(last);
    }
  }
  ConditionedSampleSet set;
  set.rows = SampleMatrix(static_cast<Eigen::Index>(keep.size()), d);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    set.rows.row(row).head(d - 1) = partial_rows.row(keep[i]);
    set.rows(row, d - 1) = last_values[i];
  }
  set.bound_rejected = static_cast<std::size_t>(partial_rows.rows()) - keep.size();
  return set;
}

namespace {

// Rows of a draw that never reached the acceptance floor: the matched part is
// kept, the rest counts as rejected.
ConditionedSampleSet partial_or_empty(const SampleMatrix& partial, const ComponentBounds& last_bounds,
                                      std::size_t rejected, std::string diagnostic) {
  ConditionedSampleSet set;
  if (partial.rows() == 0) {
    set.rows = SampleMatrix(0, partial.cols() + 1);
    set.status = SampleStatus::Infeasible;
  } else {
    set = finalize_last_component(partial, last_bounds);
    set.status = SampleStatus::RejectionOverflow;
  }
  set.pairing_rejected = rejected;
  set.diagnostic = std::move(diagnostic);
  return set;
}

}  // namespace

ConditionedSampleSet sample_conditioned(std::span<const ComponentBounds> bounds, const SamplerConfig& cfg,
                                        RngStream& rng) {
  const std::size_t d = bounds.size();
  if (cfg.n_samp == 0) throw DomainError("n_samp must be positive");
  if (cfg.max_rej >= cfg.n_samp) throw ConfigError("max_rej must be smaller than n_samp");
  switch (d) {
    case 1: return sample_dim1(bounds, cfg, rng);
    case 2: return sample_dim2(bounds, cfg, rng);
    case 3: {
      const PairedSamples paired = sample_dim_gt2(bounds, cfg, rng);
      const SampleMatrix partial = columns_to_rows({&paired.first, &paired.second});
      if (!paired.feasible) return partial_or_empty(partial, bounds[2], paired.rejected, paired.diagnostic);
      auto set = finalize_last_component(partial, bounds[2]);
      set.pairing_rejected = paired.rejected;
      return set;
    }
    case 4: {
      const PairedSamples paired = sample_dim_gt2(bounds, cfg, rng);
      if (paired.sum_vec.empty()) {
        return partial_or_empty(SampleMatrix(0, 3), bounds[3], cfg.n_samp, paired.diagnostic);
      }
      const TripleSamples triple = extend_dim_gt3(paired, bounds, cfg, rng);
      const SampleMatrix partial = columns_to_rows({&triple.first, &triple.second, &triple.third});
      if (!paired.feasible || !triple.feasible) {
        return partial_or_empty(partial, bounds[3], triple.rejected,
                                paired.feasible ? triple.diagnostic : paired.diagnostic);
      }
      auto set = finalize_last_component(partial, bounds[3]);
      set.pairing_rejected = triple.rejected;
      return set;
    }
    default:
      throw DomainError("conditioned sampling supports 1 to 4 components, got " + std::to_string(d));
  }
}

}  // namespace castro
