#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace castro {

// n x d matrix of compositions, one experiment per row.
using SampleMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

SampleMatrix vstack(const SampleMatrix& top, const SampleMatrix& bottom);

SampleMatrix take_rows(const SampleMatrix& m, std::span<const std::size_t> rows);

// Left-to-right sum of one row. Used wherever the exact summation order
// matters for reproducing a sum-to-one check.
double row_sum(const SampleMatrix& m, Eigen::Index row);

std::vector<double> row_vector(const SampleMatrix& m, Eigen::Index row);

}  // namespace castro
