#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "castro/bounds.hpp"
#include "castro/matrix.hpp"

namespace castro {

// Hickernell's centered L2 discrepancy of a design in [0,1]^d (the root, not the square).
double centered_l2_discrepancy(const SampleMatrix& design);

// Hickernell's wrap-around L2 discrepancy of a design in [0,1]^d.
double wraparound_l2_discrepancy(const SampleMatrix& design);

// Mean over columns of the unbiased sample variance. Needs n >= 2.
double design_variance(const SampleMatrix& design);

// Min-max scales each column by its component bounds. Values outside the
// bounds by more than 1e-9 raise DomainError.
SampleMatrix scale_to_unit_cube(const SampleMatrix& rows, std::span<const ComponentBounds> bounds);

struct Projection {
  Eigen::MatrixXd coords;         // n x 2
  std::array<double, 2> explained{};  // explained-variance fractions
  std::vector<std::size_t> dropped_columns;  // zero-variance columns
};

// Standard-scales the columns, then projects onto the top two principal
// axes. Each axis is oriented so its largest-magnitude loading is positive.
Projection pca_project_2d(const SampleMatrix& rows);

enum class MetricsScope { Selected, SelectedPlusData, Pool };

std::string_view scope_name(MetricsScope scope);

struct MetricsReport {
  MetricsScope scope = MetricsScope::Selected;
  std::size_t point_count = 0;
  double cd = 0.0;
  double wd = 0.0;
  std::optional<double> variance;  // unset for a single point
};

using MetricsTable = std::array<MetricsReport, 3>;

// CD, WD and variance of the selected design, the selected design plus the
// prior data, and the working pool, all on unit-cube-scaled coordinates.
MetricsTable metrics_table(const SampleMatrix& selected, const SampleMatrix& data, const SampleMatrix& pool,
                           std::span<const ComponentBounds> bounds);

MetricsReport compute_metrics(MetricsScope scope, const SampleMatrix& unit_rows);

}  // namespace castro
