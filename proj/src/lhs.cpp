#include "castro/lhs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "castro/error.hpp"

namespace castro {
namespace {

constexpr double kBelowOne = 1.0 - 0x1.0p-53;

double stratum_value(std::size_t stratum, double jitter, std::size_t n) {
  return std::min((static_cast<double>(stratum) + jitter) / static_cast<double>(n), kBelowOne);
}

void require_shape(std::size_t n, std::size_t d) {
  if (n == 0 || d == 0) throw DomainError("design needs n >= 1 and d >= 1");
}

}  // namespace

std::string_view engine_name(Engine engine) {
  return engine == Engine::Lhs ? "lhs" : "lhsmdu";
}

Engine parse_engine(std::string_view name) {
  if (name == "lhs" || name == "LHS") return Engine::Lhs;
  if (name == "lhsmdu" || name == "LHSMDU") return Engine::Lhsmdu;
  throw ConfigError("unknown sampling engine '" + std::string(name) + "' (expected lhs or lhsmdu)");
}

bool has_latin_property(const UnitDesign& design) {
  const std::size_t n = design.n();
  for (Eigen::Index c = 0; c < design.values.cols(); ++c) {
    std::vector<bool> seen(n, false);
    for (Eigen::Index r = 0; r < design.values.rows(); ++r) {
      const double v = design.values(r, c);
      if (!(v >= 0.0 && v < 1.0)) return false;
      const auto stratum = static_cast<std::size_t>(std::floor(v * static_cast<double>(n)));
      if (stratum >= n || seen[stratum]) return false;
      seen[stratum] = true;
    }
  }
  return true;
}

UnitDesign lhs_unit(std::size_t n, std::size_t d, RngStream& rng) {
  require_shape(n, d);
  UnitDesign design{SampleMatrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d))};
  std::vector<std::size_t> strata(n);
  for (std::size_t c = 0; c < d; ++c) {
    std::iota(strata.begin(), strata.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(strata));
    for (std::size_t r = 0; r < n; ++r) {
      design.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          stratum_value(strata[r], rng.uniform(), n);
    }
  }
  return design;
}

UnitDesign lhsmdu_unit(std::size_t n, std::size_t d, RngStream& rng, std::size_t oversample) {
  require_shape(n, d);
  if (oversample < 2) throw DomainError("lhsmdu oversampling factor must be at least 2");

  const std::size_t total = oversample * n;
  SampleMatrix candidates(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(d));
  for (Eigen::Index r = 0; r < candidates.rows(); ++r) {
    for (Eigen::Index c = 0; c < candidates.cols(); ++c) candidates(r, c) = rng.uniform();
  }

  std::vector<double> dist(total * total, 0.0);
  for (std::size_t i = 0; i < total; ++i) {
    for (std::size_t j = i + 1; j < total; ++j) {
      const double dij = (candidates.row(static_cast<Eigen::Index>(i)) -
                          candidates.row(static_cast<Eigen::Index>(j))).norm();
      dist[i * total + j] = dij;
      dist[j * total + i] = dij;
    }
  }

  std::vector<std::size_t> alive(total);
  std::iota(alive.begin(), alive.end(), std::size_t{0});
  std::vector<double> nearest(total);
  std::vector<double> second(total);
  const auto refresh = [&](std::size_t i) {
    double n1 = std::numeric_limits<double>::infinity();
    double n2 = std::numeric_limits<double>::infinity();
    for (std::size_t j : alive) {
      if (j == i) continue;
      const double v = dist[i * total + j];
      if (v < n1) {
        n2 = n1;
        n1 = v;
      } else if (v < n2) {
        n2 = v;
      }
    }
    nearest[i] = n1;
    second[i] = n2;
  };
  for (std::size_t i : alive) refresh(i);

  while (alive.size() > n) {
    std::size_t victim = 0;
    double victim_score = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < alive.size(); ++a) {
      const std::size_t i = alive[a];
      const double score = std::isfinite(second[i]) ? 0.5 * (nearest[i] + second[i]) : nearest[i];
      if (score < victim_score) {
        victim_score = score;
        victim = a;
      }
    }
    const std::size_t removed = alive[victim];
    alive.erase(alive.begin() + static_cast<std::ptrdiff_t>(victim));
    // Only points that had the removed one among their two nearest change.
    for (std::size_t i : alive) {
      if (dist[i * total + removed] <= second[i]) refresh(i);
    }
  }

  UnitDesign design{SampleMatrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d))};
  std::vector<std::size_t> order(n);
  for (std::size_t c = 0; c < d; ++c) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      return candidates(static_cast<Eigen::Index>(alive[x]), static_cast<Eigen::Index>(c)) <
             candidates(static_cast<Eigen::Index>(alive[y]), static_cast<Eigen::Index>(c));
    });
    for (std::size_t rank = 0; rank < n; ++rank) {
      design.values(static_cast<Eigen::Index>(order[rank]), static_cast<Eigen::Index>(c)) =
          stratum_value(rank, rng.uniform(), n);
    }
  }
  return design;
}

UnitDesign draw_unit(Engine engine, std::size_t n, std::size_t d, RngStream& rng, std::size_t oversample) {
  return engine == Engine::Lhs ? lhs_unit(n, d, rng) : lhsmdu_unit(n, d, rng, oversample);
}

SampleMatrix scale_to_bounds(const UnitDesign& design, std::span<const ComponentBounds> bounds) {
  if (bounds.size() != design.d()) throw DomainError("scale_to_bounds: bounds count does not match design");
  SampleMatrix out(design.values.rows(), design.values.cols());
  for (Eigen::Index c = 0; c < out.cols(); ++c) {
    const auto& b = bounds[static_cast<std::size_t>(c)];
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
      out(r, c) = b.lower + design.values(r, c) * (b.upper - b.lower);
    }
  }
  return out;
}

}  // namespace castro
