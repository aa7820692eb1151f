#pragma once

#include <cstddef>
#include <span>
#include <string_view>

#include "castro/bounds.hpp"
#include "castro/matrix.hpp"
#include "castro/rng.hpp"

namespace castro {

enum class Engine { Lhs, Lhsmdu };

std::string_view engine_name(Engine engine);
Engine parse_engine(std::string_view name);

// n x d design with entries in [0, 1).
struct UnitDesign {
  SampleMatrix values;

  std::size_t n() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t d() const { return static_cast<std::size_t>(values.cols()); }
};

// True when every column has exactly one entry in each stratum [k/n, (k+1)/n).
bool has_latin_property(const UnitDesign& design);

// Standard Latin hypercube: per column a uniform random permutation of the
// strata, with a uniform position inside each stratum.
UnitDesign lhs_unit(std::size_t n, std::size_t d, RngStream& rng);

// Latin hypercube with multidimensional uniformity. Draws oversample * n
// uniform candidates, repeatedly removes the candidate whose mean distance to
// its two nearest remaining neighbours is smallest until n remain, then
// re-stratifies each column by rank.
UnitDesign lhsmdu_unit(std::size_t n, std::size_t d, RngStream& rng, std::size_t oversample = 5);

UnitDesign draw_unit(Engine engine, std::size_t n, std::size_t d, RngStream& rng,
                     std::size_t oversample = 5);

// x -> lower + x * (upper - lower), column by column.
SampleMatrix scale_to_bounds(const UnitDesign& design, std::span<const ComponentBounds> bounds);

}  // namespace castro
