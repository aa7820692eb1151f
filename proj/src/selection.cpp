#include "castro/selection.hpp"

#include <cfenv>
#include <cmath>
#include <limits>
#include <numeric>

#include "castro/error.hpp"

namespace castro {

Eigen::MatrixXd distance_matrix(const SampleMatrix& a, const SampleMatrix& b) {
  if (a.cols() != b.cols()) {
    throw DomainError("distance_matrix: column counts differ (" + std::to_string(a.cols()) + " vs " +
                      std::to_string(b.cols()) + ")");
  }
  Eigen::MatrixXd out(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) out(i, j) = (a.row(i) - b.row(j)).norm();
  }
  return out;
}

DistanceReport distance_report(const SampleMatrix& candidates, const SampleMatrix& data) {
  DistanceReport report;
  const Eigen::Index n = candidates.rows();
  report.min_to_data = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  report.mean_to_data = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::quiet_NaN());
  if (data.rows() > 0) {
    const Eigen::MatrixXd d = distance_matrix(candidates, data);
    report.min_to_data = d.rowwise().minCoeff();
    report.mean_to_data = d.rowwise().mean();
  }
  report.pairwise = distance_matrix(candidates, candidates);
  return report;
}

Selection farthest_from_data(const SampleMatrix& candidates, const SampleMatrix& data, std::size_t k,
                             std::optional<double> min_mutual) {
  const auto n = static_cast<std::size_t>(candidates.rows());
  if (k > n) {
    throw DomainError("cannot select " + std::to_string(k) + " rows from " + std::to_string(n) + " candidates");
  }
  if (data.rows() > 0 && data.cols() != candidates.cols()) throw DomainError("farthest_from_data: dimension mismatch");

  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  if (data.rows() > 0) {
    const Eigen::MatrixXd d = distance_matrix(candidates, data);
    for (std::size_t i = 0; i < n; ++i) nearest[i] = d.row(static_cast<Eigen::Index>(i)).minCoeff();
  }
  std::vector<bool> blocked(n, false);

  Selection sel;
  while (sel.indices.size() < k) {
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!blocked[i] && (best == n || nearest[i] > nearest[best])) best = i;
    }
    if (best == n) break;
    blocked[best] = true;
    sel.indices.push_back(best);
    for (std::size_t i = 0; i < n; ++i) {
      if (blocked[i]) continue;
      const double dist =
          (candidates.row(static_cast<Eigen::Index>(i)) - candidates.row(static_cast<Eigen::Index>(best))).norm();
      nearest[i] = std::min(nearest[i], dist);
      if (min_mutual && dist < *min_mutual) blocked[i] = true;
    }
  }
  sel.rows = take_rows(candidates, sel.indices);
  if (sel.indices.size() < k) {
    sel.shortfall = true;
    sel.warning = "minimum mutual distance left only " + std::to_string(sel.indices.size()) + " of " +
                  std::to_string(k) + " requested rows";
  }
  return sel;
}

RoundedDesign round_and_renormalize(const SampleMatrix& samples, int decimals, std::span<const ComponentBounds> bounds) {
  if (decimals < 0 || decimals > 12) throw DomainError("decimals must lie in [0, 12]");
  if (!bounds.empty() && bounds.size() != static_cast<std::size_t>(samples.cols())) {
    throw DomainError("round_and_renormalize: bounds count does not match columns");
  }
  const auto scale = static_cast<long long>(std::llround(std::pow(10.0, decimals)));
  const auto fscale = static_cast<double>(scale);
  constexpr double kBoundTol = 1e-12;

  const int saved_mode = std::fegetround();
  std::fesetround(FE_TONEAREST);

  RoundedDesign out;
  out.rows = SampleMatrix(samples.rows(), samples.cols());
  const auto d = static_cast<std::size_t>(samples.cols());
  std::vector<long long> units(d);
  for (Eigen::Index r = 0; r < samples.rows(); ++r) {
    long long total = 0;
    for (std::size_t c = 0; c < d; ++c) {
      units[c] = std::llrint(samples(r, static_cast<Eigen::Index>(c)) * fscale);
      total += units[c];
    }
    const long long residual = scale - total;

    auto in_bounds = [&](std::size_t c, long long u) {
      return bounds.empty() || bounds[c].contains(static_cast<double>(u) / fscale, kBoundTol);
    };

    if (residual != 0) {
      std::vector<std::size_t> order(d);
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (units[a] != units[b]) return units[a] > units[b];
        return samples(r, static_cast<Eigen::Index>(a)) > samples(r, static_cast<Eigen::Index>(b));
      });
      std::size_t target = order.front();
      for (std::size_t c : order) {
        if (units[c] == 0) break;
        if (units[c] + residual >= 0 && in_bounds(c, units[c] + residual)) {
          target = c;
          break;
        }
      }
      units[target] += residual;
    }

    bool violates = false;
    for (std::size_t c = 0; c < d; ++c) {
      const double v = static_cast<double>(units[c]) / fscale;
      out.rows(r, static_cast<Eigen::Index>(c)) = v;
      if (units[c] < 0 || !in_bounds(c, units[c])) violates = true;
    }
    if (violates) out.flagged.push_back(static_cast<std::size_t>(r));
  }
  std::fesetround(saved_mode);
  return out;
}

}  // namespace castro
