#include "castro/bounds.hpp"

#include <numeric>
#include <sstream>

#include "castro/error.hpp"

namespace castro {

void validate_bounds(const ComponentBounds& bounds) {
  if (!(bounds.lower >= 0.0 && bounds.lower <= bounds.upper && bounds.upper <= 1.0)) {
    std::ostringstream msg;
    msg << "component '" << bounds.name << "': bounds [" << bounds.lower << ", " << bounds.upper
        << "] must satisfy 0 <= lower <= upper <= 1";
    throw ConfigError(msg.str());
  }
}

double sum_of_lowers(std::span<const ComponentBounds> bounds) {
  return std::accumulate(bounds.begin(), bounds.end(), 0.0,
                         [](double acc, const ComponentBounds& b) { return acc + b.lower; });
}

double sum_of_uppers(std::span<const ComponentBounds> bounds) {
  return std::accumulate(bounds.begin(), bounds.end(), 0.0,
                         [](double acc, const ComponentBounds& b) { return acc + b.upper; });
}

bool mixture_feasible(std::span<const ComponentBounds> bounds) {
  constexpr double kSlack = 1e-12;
  return sum_of_lowers(bounds) <= 1.0 + kSlack && sum_of_uppers(bounds) >= 1.0 - kSlack;
}

std::vector<ComponentBounds> permute_bounds(std::span<const ComponentBounds> bounds,
                                            std::span<const std::size_t> order) {
  std::vector<ComponentBounds> out;
  out.reserve(order.size());
  for (std::size_t idx : order) out.push_back(bounds[idx]);
  return out;
}

}  // namespace castro
