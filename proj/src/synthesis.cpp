#include "castro/synthesis.hpp"

#include <algorithm>
#include <numeric>
#include <optional>

#include "castro/error.hpp"

namespace castro {
namespace {

std::vector<std::size_t> descending_order(std::span<const double> row) {
  std::vector<std::size_t> order(row.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return row[a] > row[b]; });
  return order;
}

SynthesisOutcome single_outcome(std::size_t n, std::size_t k, SynthesisRule rule) {
  SynthesisOutcome out;
  out.row.assign(n, 0.0);
  out.row[k] = 1.0;
  out.support = {k};
  out.rule = rule;
  return out;
}

// Keeps a and b, rescaled to sum to one with their ratio preserved. The
// larger share is computed by division and the smaller as its complement, so
// the two add up to exactly 1.
SynthesisOutcome pair_outcome(std::span<const double> row, std::size_t a, std::size_t b, SynthesisRule rule) {
  const std::size_t big = row[a] >= row[b] ? a : b;
  const std::size_t small = big == a ? b : a;
  SynthesisOutcome out;
  out.row.assign(row.size(), 0.0);
  out.row[big] = row[big] / (row[a] + row[b]);
  out.row[small] = 1.0 - out.row[big];
  out.support = {std::min(a, b), std::max(a, b)};
  out.rule = rule;
  return out;
}

SynthesisOutcome rejected(std::span<const double> row, std::string diagnostic) {
  SynthesisOutcome out;
  out.row.assign(row.begin(), row.end());
  out.rule = SynthesisRule::Rejected;
  out.diagnostic = std::move(diagnostic);
  return out;
}

}  // namespace

std::string_view rule_name(SynthesisRule rule) {
  switch (rule) {
    case SynthesisRule::SingleRounded: return "single_rounded";
    case SynthesisRule::PairKept: return "pair_kept";
    case SynthesisRule::Fallback: return "fallback";
    case SynthesisRule::OneHot: return "one_hot";
    case SynthesisRule::Rejected: return "rejected";
  }
  return "unknown";
}

SynthesisOutcome apply_pair_synthesis(std::span<const double> row, const SynthesisConstraint& constraint) {
  if (row.empty()) throw DomainError("synthesis: empty row");
  if (constraint.mode != SynthesisConstraint::Mode::Pairs) throw DomainError("apply_pair_synthesis needs mode=pairs");

  const auto order = descending_order(row);
  const std::size_t top = order[0];

  if (row[top] >= 0.5) {
    if (order.size() > 1) {
      const std::size_t second = order[1];
      if (row[second] > 0.0 && constraint.pair_allowed(top, second)) {
        return pair_outcome(row, top, second, SynthesisRule::PairKept);
      }
    }
    if (constraint.single_allowed(top)) return single_outcome(row.size(), top, SynthesisRule::SingleRounded);

    // The dominant component cannot stand alone: keep its heaviest allowed partner.
    std::size_t partner = row.size();
    for (const auto& [a, b] : constraint.allowed_pairs) {
      const std::size_t other = a == top ? b : (b == top ? a : row.size());
      if (other == row.size() || row[other] <= 0.0) continue;
      if (partner == row.size() || row[other] > row[partner]) partner = other;
    }
    if (partner != row.size()) {
      auto out = pair_outcome(row, top, partner, SynthesisRule::PairKept);
      out.diagnostic = "second-largest component is not an allowed partner";
      return out;
    }
    return rejected(row, "component " + std::to_string(top) + " dominates but is neither an allowed single nor "
                         "part of an allowed pair with a non-zero partner");
  }

  // No component reaches 0.5: keep the allowed support carrying the most mass.
  double best_mass = 0.0;
  std::optional<std::pair<std::size_t, std::size_t>> best_pair;
  std::optional<std::size_t> best_single;
  for (std::size_t a : constraint.allowed_singles) {
    if (row[a] > best_mass) {
      best_mass = row[a];
      best_single = a;
      best_pair.reset();
    }
  }
  for (const auto& [a, b] : constraint.allowed_pairs) {
    if (row[a] > 0.0 && row[b] > 0.0 && row[a] + row[b] > best_mass) {
      best_mass = row[a] + row[b];
      best_pair = std::make_pair(a, b);
      best_single.reset();
    }
  }
  if (best_pair) return pair_outcome(row, best_pair->first, best_pair->second, SynthesisRule::Fallback);
  if (best_single) return single_outcome(row.size(), *best_single, SynthesisRule::Fallback);
  return rejected(row, "no allowed single or pair carries any mass");
}

SynthesisOutcome apply_onehot_synthesis(std::span<const double> row) {
  if (row.empty()) throw DomainError("synthesis: empty row");
  const auto top = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
  return single_outcome(row.size(), top, SynthesisRule::OneHot);
}

SynthesisOutcome apply_synthesis(std::span<const double> row, const SynthesisConstraint& constraint) {
  return constraint.mode == SynthesisConstraint::Mode::OneHot ? apply_onehot_synthesis(row)
                                                              : apply_pair_synthesis(row, constraint);
}

bool satisfies_synthesis(std::span<const double> row, const SynthesisConstraint& constraint, double zero_tol) {
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (row[i] > zero_tol) support.push_back(i);
  }
  if (constraint.mode == SynthesisConstraint::Mode::OneHot) return support.size() == 1;
  if (support.size() == 1) return constraint.single_allowed(support[0]);
  if (support.size() == 2) return constraint.pair_allowed(support[0], support[1]);
  return false;
}

SynthesisPass apply_synthesis_to_pool(const SampleMatrix& pool, const SynthesisConstraint& constraint) {
  SynthesisPass pass;
  std::vector<std::vector<double>> kept;
  for (Eigen::Index r = 0; r < pool.rows(); ++r) {
    const auto row = row_vector(pool, r);
    auto outcome = apply_synthesis(row, constraint);
    if (!outcome.accepted()) {
      ++pass.rejected;
      continue;
    }
    kept.push_back(std::move(outcome.row));
    pass.source_rows.push_back(static_cast<std::size_t>(r));
    pass.rules.push_back(outcome.rule);
  }
  pass.rows = SampleMatrix(static_cast<Eigen::Index>(kept.size()), pool.cols());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    for (Eigen::Index c = 0; c < pool.cols(); ++c) pass.rows(static_cast<Eigen::Index>(i), c) = kept[i][static_cast<std::size_t>(c)];
  }
  return pass;
}

}  // namespace castro
