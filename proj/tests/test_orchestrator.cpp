#include <doctest.h>

#include <string>

#include "castro/error.hpp"
#include "castro/orchestrator.hpp"

using namespace castro;

namespace {

std::string data_path(const std::string& name) { return std::string(CASTRO_DATA_DIR) + "/" + name; }

const ProblemSpec& nine() {
  static const ProblemSpec spec = load_problem_config(data_path("case9d.json"));
  return spec;
}

const ProblemSpec& four() {
  static const ProblemSpec spec = load_problem_config(data_path("case4d.json"));
  return spec;
}

}  // namespace

TEST_SUITE("orchestrator") {
  TEST_CASE("group patterns are scaled by their aggregate") {
    SampleMatrix main(1, 4);
    main << 0.85, 0.03, 0.05, 0.07;
    SampleMatrix amino(1, 4);
    amino << 1, 0, 0, 0;
    SampleMatrix metal(1, 3);
    metal << 0, 1, 0;
    const std::vector<SampleMatrix> groups{amino, metal};
    const auto full = reassemble(main, groups, nine());
    REQUIRE(full.cols() == 9);
    const std::vector<double> expected{0.85, 0.03, 0.05, 0, 0, 0, 0, 0.07, 0};
    for (std::size_t c = 0; c < 9; ++c) CHECK(full(0, static_cast<Eigen::Index>(c)) == doctest::Approx(expected[c]));
  }

  TEST_CASE("an empty aggregate zeroes its group") {
    SampleMatrix main(1, 4);
    main << 0.9, 0.0, 0.0, 0.1;
    SampleMatrix amino(1, 4);
    amino << 0.5, 0, 0, 0.5;
    SampleMatrix metal(1, 3);
    metal << 0, 0, 1;
    const std::vector<SampleMatrix> groups{amino, metal};
    const auto full = reassemble(main, groups, nine());
    CHECK(full(0, 2) == 0.0);
    CHECK(full(0, 5) == 0.0);
    CHECK(full(0, 8) == doctest::Approx(0.1));
    CHECK(full.row(0).sum() == doctest::Approx(1.0));
  }

  TEST_CASE("without a partition reassembly is the identity") {
    SampleMatrix main(2, 4);
    main << 0.85, 0.03, 0.05, 0.07, 0.9, 0.02, 0.04, 0.04;
    const auto full = reassemble(main, {}, four());
    CHECK(full == main);
  }

  TEST_CASE("mismatched blocks are rejected") {
    SampleMatrix main(2, 4);
    main.setZero();
    SampleMatrix amino(1, 4);
    SampleMatrix metal(2, 3);
    const std::vector<SampleMatrix> groups{amino, metal};
    CHECK_THROWS_AS(reassemble(main, groups, nine()), DomainError);
  }

  TEST_CASE("row validation catches each kind of violation") {
    const auto& spec = nine();
    const std::vector<double> good{0.85, 0.03, 0.02, 0, 0, 0.03, 0, 0.07, 0};
    CHECK(validate_recommendation_row(good, spec, 1e-9, 1e-9).empty());
    std::vector<double> sum = good;
    sum[0] = 0.86;
    CHECK_FALSE(validate_recommendation_row(sum, spec, 1e-9, 1e-9).empty());
    const std::vector<double> forbidden{0.85, 0.03, 0, 0.02, 0, 0.03, 0, 0.07, 0};
    CHECK_FALSE(validate_recommendation_row(forbidden, spec, 1e-9, 1e-9).empty());
    const std::vector<double> two_metals{0.85, 0.03, 0.05, 0, 0, 0, 0.03, 0.04, 0};
    CHECK_FALSE(validate_recommendation_row(two_metals, spec, 1e-9, 1e-9).empty());
    const std::vector<double> too_much_amino{0.8, 0.0, 0.2, 0, 0, 0, 0, 0, 0};
    CHECK_FALSE(validate_recommendation_row(too_much_amino, spec, 1e-9, 1e-9).empty());
  }

  TEST_CASE("the nine-component pipeline produces valid designs") {
    const auto& spec = nine();
    const auto data = load_experiment_csv(data_path("case9d_experiments.csv"), spec);
    RunOptions options;
    options.seed = 5;
    options.threads = 4;
    const auto result = run_pipeline(spec, data, options);
    CHECK(result.subproblems.size() == 3);
    REQUIRE(result.recommendations.size() == 2);
    for (const auto& rec : result.recommendations) {
      CHECK(rec.rows.rows() == 15);
      CHECK(rec.flagged.empty());
      CHECK(rec.provenance.size() == 15);
      REQUIRE(rec.metrics.has_value());
      for (Eigen::Index r = 0; r < rec.rows.rows(); ++r) {
        const std::vector<double> row(rec.rows.row(r).begin(), rec.rows.row(r).end());
        CHECK(validate_recommendation_row(row, spec, 1e-9, 1e-9).empty());
      }
    }

    options.threads = 1;
    const auto again = run_pipeline(spec, data, options);
    for (std::size_t e = 0; e < 2; ++e) {
      CHECK(again.recommendations[e].rows == result.recommendations[e].rows);
      CHECK(again.recommendations[e].working_pool == result.recommendations[e].working_pool);
    }
  }

  TEST_CASE("a budget equal to the candidate count selects everything") {
    ProblemSpec spec = four();
    SampleMatrix cand(3, 4);
    cand << 0.85, 0.03, 0.05, 0.07, 0.9, 0.02, 0.04, 0.04, 0.95, 0.01, 0.02, 0.02;
    const auto rec = final_select(cand, empty_dataset(spec), spec, 3, 3);
    CHECK(rec.rows.rows() == 3);
    CHECK_THROWS(final_select(cand, empty_dataset(spec), spec, 4, 3));
  }

  TEST_CASE("a different seed gives a different design") {
    const auto& spec = four();
    RunOptions a;
    a.seed = 1;
    a.engines = {Engine::Lhs};
    RunOptions b = a;
    b.seed = 2;
    CHECK(run_pipeline(spec, empty_dataset(spec), a).recommendations[0].rows !=
          run_pipeline(spec, empty_dataset(spec), b).recommendations[0].rows);
  }
}
