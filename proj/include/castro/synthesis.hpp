#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "castro/matrix.hpp"
#include "castro/problem.hpp"

namespace castro {

enum class SynthesisRule {
  SingleRounded,  // dominant component rounded up to 1
  PairKept,       // dominant component and its partner renormalized
  Fallback,       // no component reached 0.5; heaviest allowed support kept
  OneHot,
  Rejected,
};

std::string_view rule_name(SynthesisRule rule);

struct SynthesisOutcome {
  std::vector<double> row;
  std::vector<std::size_t> support;
  SynthesisRule rule = SynthesisRule::Rejected;
  std::string diagnostic;

  bool accepted() const { return rule != SynthesisRule::Rejected; }
};

// Pair-combination rounding for a group with an allowed pair/single list.
SynthesisOutcome apply_pair_synthesis(std::span<const double> row, const SynthesisConstraint& constraint);

// Sets the largest component (lowest index on ties) to 1 and the rest to 0.
SynthesisOutcome apply_onehot_synthesis(std::span<const double> row);

SynthesisOutcome apply_synthesis(std::span<const double> row, const SynthesisConstraint& constraint);

// Whether the support of `row` (entries above `zero_tol`) is synthesizable.
bool satisfies_synthesis(std::span<const double> row, const SynthesisConstraint& constraint,
                         double zero_tol = 0.0);

struct SynthesisPass {
  SampleMatrix rows;  // accepted rows only
  std::vector<std::size_t> source_rows;
  std::vector<SynthesisRule> rules;
  std::size_t rejected = 0;
};

SynthesisPass apply_synthesis_to_pool(const SampleMatrix& pool, const SynthesisConstraint& constraint);

}  // namespace castro
