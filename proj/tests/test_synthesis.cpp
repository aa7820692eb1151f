#include <doctest.h>

#include "castro/error.hpp"
#include "castro/rng.hpp"
#include "castro/synthesis.hpp"

using namespace castro;

namespace {

// CS, BN, THAM, MEL
SynthesisConstraint amino() {
  SynthesisConstraint c;
  c.mode = SynthesisConstraint::Mode::Pairs;
  c.allowed_pairs = {{0, 2}, {0, 3}, {2, 3}};
  c.allowed_singles = {0, 1, 2, 3};
  return c;
}

SynthesisConstraint onehot() { return {}; }

}  // namespace

TEST_SUITE("synthesis") {
  TEST_CASE("an allowed pair is kept and renormalized") {
    const std::vector<double> row{0.3, 0.05, 0.05, 0.6};
    const auto out = apply_pair_synthesis(row, amino());
    CHECK(out.rule == SynthesisRule::PairKept);
    CHECK(out.support == std::vector<std::size_t>{0, 3});
    CHECK(out.row[3] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(out.row[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(out.row[1] == 0.0);
    CHECK(out.row[0] + out.row[3] == 1.0);
  }

  TEST_CASE("a forbidden partner collapses to the dominant single") {
    const std::vector<double> row{0.1, 0.35, 0.0, 0.55};
    const auto out = apply_pair_synthesis(row, amino());
    CHECK(out.rule == SynthesisRule::SingleRounded);
    CHECK(out.row == std::vector<double>{0, 0, 0, 1});
  }

  TEST_CASE("without a component at 0.5 the heaviest allowed support wins") {
    const std::vector<double> row{0.3, 0.4, 0.25, 0.05};
    const auto out = apply_pair_synthesis(row, amino());
    CHECK(out.rule == SynthesisRule::Fallback);
    CHECK(out.support == std::vector<std::size_t>{0, 2});  // CS + THAM = 0.55
    CHECK(out.row[0] + out.row[2] == 1.0);
  }

  TEST_CASE("a dominant component that cannot stand alone keeps its best partner") {
    SynthesisConstraint c = amino();
    c.allowed_singles = {1};
    const std::vector<double> row{0.1, 0.3, 0.0, 0.6};
    const auto out = apply_pair_synthesis(row, c);
    CHECK(out.rule == SynthesisRule::PairKept);
    CHECK(out.support == std::vector<std::size_t>{0, 3});

    c.allowed_pairs = {};
    CHECK(apply_pair_synthesis(row, c).rule == SynthesisRule::Rejected);
  }

  TEST_CASE("one-hot picks the first maximum") {
    const std::vector<double> row{0.4, 0.4, 0.2};
    const auto out = apply_onehot_synthesis(row);
    CHECK(out.row == std::vector<double>{1, 0, 0});
    CHECK(out.rule == SynthesisRule::OneHot);
  }

  TEST_CASE("support checks") {
    const auto c = amino();
    CHECK(satisfies_synthesis(std::vector<double>{0, 1, 0, 0}, c));
    CHECK(satisfies_synthesis(std::vector<double>{0.4, 0, 0, 0.6}, c));
    CHECK_FALSE(satisfies_synthesis(std::vector<double>{0, 0.4, 0, 0.6}, c));
    CHECK_FALSE(satisfies_synthesis(std::vector<double>{0.2, 0, 0.2, 0.6}, c));
    CHECK(satisfies_synthesis(std::vector<double>{0, 0, 1}, onehot()));
    CHECK_FALSE(satisfies_synthesis(std::vector<double>{0, 0.5, 0.5}, onehot()));
  }

  TEST_CASE("random rows always end on an allowed support summing to one") {
    RngStream rng(10);
    const auto c = amino();
    for (int t = 0; t < 2000; ++t) {
      std::vector<double> row(4);
      double s = 0;
      for (auto& v : row) s += v = rng.uniform();
      for (auto& v : row) v /= s;
      const auto out = apply_pair_synthesis(row, c);
      REQUIRE(out.accepted());
      CHECK(satisfies_synthesis(out.row, c));
      CHECK(out.row[0] + out.row[1] + out.row[2] + out.row[3] == doctest::Approx(1.0).epsilon(1e-15));
    }
  }

  TEST_CASE("pool pass keeps accepted rows with their source index") {
    SampleMatrix pool(2, 3);
    pool << 0.2, 0.7, 0.1, 0.5, 0.1, 0.4;
    const auto pass = apply_synthesis_to_pool(pool, onehot());
    CHECK(pass.rows.rows() == 2);
    CHECK(pass.source_rows == std::vector<std::size_t>{0, 1});
    CHECK(pass.rows(0, 1) == 1.0);
    CHECK(pass.rows(1, 0) == 1.0);
  }
}
