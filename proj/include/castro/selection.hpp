#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "castro/bounds.hpp"
#include "castro/matrix.hpp"

namespace castro {

// Entry (i, j) is the Euclidean distance between a.row(i) and b.row(j).
Eigen::MatrixXd distance_matrix(const SampleMatrix& a, const SampleMatrix& b);

struct DistanceReport {
  Eigen::VectorXd min_to_data;   // +inf when there is no data
  Eigen::VectorXd mean_to_data;  // NaN when there is no data
  Eigen::MatrixXd pairwise;
};

DistanceReport distance_report(const SampleMatrix& candidates, const SampleMatrix& data);

struct Selection {
  SampleMatrix rows;
  std::vector<std::size_t> indices;  // into the candidates, in pick order
  bool shortfall = false;
  std::string warning;
};

// Farthest-point traversal: repeatedly takes the unselected candidate with the
// largest distance to its nearest neighbour in data plus the rows selected so
// far. With min_mutual set, candidates closer than that to a selected row are
// skipped. Ties go to the lowest candidate index. Throws DomainError when
// k exceeds the candidate count.
Selection farthest_from_data(const SampleMatrix& candidates, const SampleMatrix& data, std::size_t k,
                             std::optional<double> min_mutual = std::nullopt);

struct RoundedDesign {
  SampleMatrix rows;
  std::vector<std::size_t> flagged;  // rows that still violate a bound
};

// Rounds half-to-even to `decimals` places and hands the residual
// 1 - row_sum to the largest component (ties: larger unrounded value), so each row sums to one at that
// precision. If bounds are given and the largest component would leave its
// bounds, the next largest non-zero component absorbs the residual instead;
// rows that cannot be repaired are flagged.
RoundedDesign round_and_renormalize(const SampleMatrix& samples, int decimals,
                                    std::span<const ComponentBounds> bounds = {});

}  // namespace castro
