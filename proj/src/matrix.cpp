#include "castro/matrix.hpp"

#include "castro/error.hpp"

namespace castro {

SampleMatrix vstack(const SampleMatrix& top, const SampleMatrix& bottom) {
  if (top.rows() == 0) return bottom;
  if (bottom.rows() == 0) return top;
  if (top.cols() != bottom.cols()) throw DomainError("vstack: column count mismatch");
  SampleMatrix out(top.rows() + bottom.rows(), top.cols());
  out.topRows(top.rows()) = top;
  out.bottomRows(bottom.rows()) = bottom;
  return out;
}

SampleMatrix take_rows(const SampleMatrix& m, std::span<const std::size_t> rows) {
  SampleMatrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

double row_sum(const SampleMatrix& m, Eigen::Index row) {
  double s = 0.0;
  for (Eigen::Index c = 0; c < m.cols(); ++c) s += m(row, c);
  return s;
}

std::vector<double> row_vector(const SampleMatrix& m, Eigen::Index row) {
  std::vector<double> out(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index c = 0; c < m.cols(); ++c) out[static_cast<std::size_t>(c)] = m(row, c);
  return out;
}

}  // namespace castro
