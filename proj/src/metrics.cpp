#include "castro/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "castro/error.hpp"

namespace castro {
namespace {

constexpr double kDomainTolerance = 1e-9;

void require_unit_cube(const SampleMatrix& design, const char* what) {
  if (design.rows() == 0) throw DomainError(std::string(what) + ": empty design");
  for (Eigen::Index r = 0; r < design.rows(); ++r) {
    for (Eigen::Index c = 0; c < design.cols(); ++c) {
      const double v = design(r, c);
      if (!(v >= -kDomainTolerance && v <= 1.0 + kDomainTolerance)) {
        throw DomainError(std::string(what) + ": value " + std::to_string(v) + " at row " + std::to_string(r) +
                          ", column " + std::to_string(c) + " is outside [0,1]");
      }
    }
  }
}

}  // namespace

double centered_l2_discrepancy(const SampleMatrix& design) {
  require_unit_cube(design, "centered discrepancy");
  const auto n = static_cast<double>(design.rows());
  const auto d = design.cols();

  double single = 0.0;
  for (Eigen::Index i = 0; i < design.rows(); ++i) {
    double prod = 1.0;
    for (Eigen::Index k = 0; k < d; ++k) {
      const double z = std::abs(design(i, k) - 0.5);
      prod *= 1.0 + 0.5 * z - 0.5 * z * z;
    }
    single += prod;
  }

  double pairs = 0.0;
  for (Eigen::Index i = 0; i < design.rows(); ++i) {
    for (Eigen::Index j = 0; j < design.rows(); ++j) {
      double prod = 1.0;
      for (Eigen::Index k = 0; k < d; ++k) {
        const double zi = std::abs(design(i, k) - 0.5);
        const double zj = std::abs(design(j, k) - 0.5);
        prod *= 1.0 + 0.5 * zi + 0.5 * zj - 0.5 * std::abs(design(i, k) - design(j, k));
      }
      pairs += prod;
    }
  }

  const double squared = std::pow(13.0 / 12.0, static_cast<double>(d)) - 2.0 / n * single + pairs / (n * n);
  return std::sqrt(std::max(squared, 0.0));
}

double wraparound_l2_discrepancy(const SampleMatrix& design) {
  require_unit_cube(design, "wrap-around discrepancy");
  const auto n = static_cast<double>(design.rows());
  const auto d = design.cols();

  double pairs = 0.0;
  for (Eigen::Index i = 0; i < design.rows(); ++i) {
    for (Eigen::Index j = 0; j < design.rows(); ++j) {
      double prod = 1.0;
      for (Eigen::Index k = 0; k < d; ++k) {
        const double delta = std::abs(design(i, k) - design(j, k));
        prod *= 1.5 - delta * (1.0 - delta);
      }
      pairs += prod;
    }
  }
  const double squared = -std::pow(4.0 / 3.0, static_cast<double>(d)) + pairs / (n * n);
  return std::sqrt(std::max(squared, 0.0));
}

double design_variance(const SampleMatrix& design) {
  if (design.rows() < 2) throw DomainError("variance needs at least two points");
  if (design.cols() == 0) throw DomainError("variance of a zero-dimensional design");
  const auto n = static_cast<double>(design.rows());
  double total = 0.0;
  for (Eigen::Index c = 0; c < design.cols(); ++c) {
    const double mean = design.col(c).mean();
    total += (design.col(c).array() - mean).square().sum() / (n - 1.0);
  }
  return total / static_cast<double>(design.cols());
}

SampleMatrix scale_to_unit_cube(const SampleMatrix& rows, std::span<const ComponentBounds> bounds) {
  if (static_cast<std::size_t>(rows.cols()) != bounds.size()) {
    throw DomainError("scale_to_unit_cube: " + std::to_string(rows.cols()) + " columns but " +
                      std::to_string(bounds.size()) + " bounds");
  }
  SampleMatrix out(rows.rows(), rows.cols());
  for (Eigen::Index c = 0; c < rows.cols(); ++c) {
    const auto& b = bounds[static_cast<std::size_t>(c)];
    const double width = b.upper - b.lower;
    for (Eigen::Index r = 0; r < rows.rows(); ++r) {
      const double v = rows(r, c);
      if (!b.contains(v, kDomainTolerance)) {
        throw DomainError("value " + std::to_string(v) + " of '" + b.name + "' at row " + std::to_string(r) +
                          " is outside [" + std::to_string(b.lower) + ", " + std::to_string(b.upper) + "]");
      }
      out(r, c) = width > 0.0 ? std::clamp((v - b.lower) / width, 0.0, 1.0) : 0.0;
    }
  }
  return out;
}

Projection pca_project_2d(const SampleMatrix& rows) {
  if (rows.rows() < 2) throw DomainError("PCA needs at least two points");

  Projection proj;
  std::vector<Eigen::Index> kept;
  for (Eigen::Index c = 0; c < rows.cols(); ++c) {
    const double mean = rows.col(c).mean();
    const double var = (rows.col(c).array() - mean).square().mean();
    if (var > 1e-24) {
      kept.push_back(c);
    } else {
      proj.dropped_columns.push_back(static_cast<std::size_t>(c));
    }
  }
  if (kept.size() < 2) throw DomainError("PCA needs at least two non-constant columns");

  const auto n = rows.rows();
  const auto m = static_cast<Eigen::Index>(kept.size());
  Eigen::MatrixXd z(n, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto col = rows.col(kept[static_cast<std::size_t>(j)]);
    const double mean = col.mean();
    const double sd = std::sqrt((col.array() - mean).square().mean());
    z.col(j) = (col.array() - mean) / sd;
  }

  const Eigen::MatrixXd cov = z.transpose() * z / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw DomainError("PCA eigen-decomposition failed");

  // Eigenvalues come back ascending.
  const Eigen::VectorXd& values = solver.eigenvalues();
  const double total = values.sum();
  Eigen::MatrixXd axes(m, 2);
  for (int a = 0; a < 2; ++a) {
    const Eigen::Index idx = m - 1 - a;
    Eigen::VectorXd v = solver.eigenvectors().col(idx);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
    axes.col(a) = v;
    proj.explained[static_cast<std::size_t>(a)] = total > 0.0 ? std::max(values(idx), 0.0) / total : 0.0;
  }
  proj.coords = z * axes;
  return proj;
}

std::string_view scope_name(MetricsScope scope) {
  switch (scope) {
    case MetricsScope::Selected: return "selected";
    case MetricsScope::SelectedPlusData: return "selected+data";
    case MetricsScope::Pool: return "pool";
  }
  return "unknown";
}

MetricsReport compute_metrics(MetricsScope scope, const SampleMatrix& unit_rows) {
  MetricsReport report;
  report.scope = scope;
  report.point_count = static_cast<std::size_t>(unit_rows.rows());
  report.cd = centered_l2_discrepancy(unit_rows);
  report.wd = wraparound_l2_discrepancy(unit_rows);
  if (unit_rows.rows() >= 2) report.variance = design_variance(unit_rows);
  return report;
}

MetricsTable metrics_table(const SampleMatrix& selected, const SampleMatrix& data, const SampleMatrix& pool,
                           std::span<const ComponentBounds> bounds) {
  const SampleMatrix sel = scale_to_unit_cube(selected, bounds);
  const SampleMatrix combined = data.rows() > 0 ? vstack(sel, scale_to_unit_cube(data, bounds)) : sel;
  return {compute_metrics(MetricsScope::Selected, sel),
          compute_metrics(MetricsScope::SelectedPlusData, combined),
          compute_metrics(MetricsScope::Pool, scale_to_unit_cube(pool, bounds))};
}

}  // namespace castro
