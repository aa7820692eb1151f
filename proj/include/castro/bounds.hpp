#pragma once

#include <span>
#include <string>
#include <vector>

namespace castro {

struct ComponentBounds {
  std::string name;
  double lower = 0.0;
  double upper = 1.0;

  bool contains(double value, double tolerance = 0.0) const {
    return value >= lower - tolerance && value <= upper + tolerance;
  }
  double width() const { return upper - lower; }

  friend bool operator==(const ComponentBounds&, const ComponentBounds&) = default;
};

// Throws ConfigError unless 0 <= lower <= upper <= 1.
void validate_bounds(const ComponentBounds& bounds);

double sum_of_lowers(std::span<const ComponentBounds> bounds);
double sum_of_uppers(std::span<const ComponentBounds> bounds);

// Sum of lowers <= 1 <= sum of uppers.
bool mixture_feasible(std::span<const ComponentBounds> bounds);

std::vector<ComponentBounds> permute_bounds(std::span<const ComponentBounds> bounds,
                                            std::span<const std::size_t> order);

}  // namespace castro
