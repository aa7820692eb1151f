#include <doctest.h>

#include <string>

#include "castro/error.hpp"
#include "castro/problem.hpp"

using namespace castro;

namespace {

const char* kNineComponents = R"({
  "components": [
    {"name": "PA-56", "lower": 0.8, "upper": 1.0},
    {"name": "PhA", "lower": 0.0, "upper": 0.05},
    {"name": "CS"}, {"name": "BN"}, {"name": "THAM"}, {"name": "MEL"},
    {"name": "CaBO"}, {"name": "ZnBO"}, {"name": "HNT"}
  ],
  "partition": [
    {"kind": "main", "name": "base", "members": ["PA-56", "PhA"],
     "aggregates": [{"name": "amino", "lower": 0.0, "upper": 0.1}, {"name": "metal", "lower": 0.0, "upper": 0.14}]},
    {"kind": "group", "name": "amino", "members": ["CS", "BN", "THAM", "MEL"], "aggregate_slot": "amino",
     "tot_samp": 360,
     "synthesis": {"mode": "pairs", "allowed_pairs": [["MEL", "CS"], ["THAM", "CS"], ["MEL", "THAM"]],
                   "allowed_singles": ["CS", "BN", "THAM", "MEL"]}},
    {"kind": "group", "name": "metal", "members": ["CaBO", "ZnBO", "HNT"], "aggregate_slot": "metal",
     "tot_samp": 120, "synthesis": {"mode": "one_hot"}}
  ],
  "budget": 15
})";

const char* kFourComponents = R"({
  "components": [
    {"name": "PA-56", "lower": 0.8, "upper": 1.0},
    {"name": "PhA", "lower": 0.0, "upper": 0.05},
    {"name": "amino", "lower": 0.0, "upper": 0.1},
    {"name": "metal", "lower": 0.0, "upper": 0.14}
  ]
})";

}  // namespace

TEST_SUITE("problem") {
  TEST_CASE("nine-component partition parses") {
    const auto spec = parse_problem_config(kNineComponents);
    REQUIRE(spec.dimension() == 9);
    REQUIRE(spec.partition.size() == 3);
    const auto& main = spec.partition[0];
    CHECK(main.kind == SubproblemSpec::Kind::Main);
    CHECK(main.dimension() == 4);
    const auto& amino = spec.partition[1];
    CHECK(amino.aggregate_slot == 2u);
    REQUIRE(amino.synthesis);
    CHECK(amino.synthesis->pair_allowed(3, 0));  // MEL + CS
    CHECK(amino.synthesis->pair_allowed(2, 0));  // THAM + CS
    CHECK_FALSE(amino.synthesis->pair_allowed(1, 3));  // BN + MEL
    CHECK(amino.synthesis->single_allowed(1));
    CHECK(spec.partition[2].aggregate_slot == 3u);
    CHECK(*amino.tot_samp == 360);
  }

  TEST_CASE("serialization round-trips") {
    const auto spec = parse_problem_config(kNineComponents);
    CHECK(parse_problem_config(serialize_problem_config(spec)) == spec);
    const auto four = parse_problem_config(kFourComponents);
    CHECK(parse_problem_config(serialize_problem_config(four)) == four);
  }

  TEST_CASE("group member bounds scale with the aggregate") {
    const auto spec = parse_problem_config(kNineComponents);
    const auto bounds = full_bounds(spec);
    CHECK(bounds[0].lower == 0.8);
    CHECK(bounds[2].upper == doctest::Approx(0.1));
    CHECK(bounds[8].upper == doctest::Approx(0.14));
    const auto main_bounds = subproblem_bounds(spec, spec.partition[0]);
    REQUIRE(main_bounds.size() == 4);
    CHECK(main_bounds[2].name == "amino");
    CHECK(main_bounds[3].upper == 0.14);
  }

  TEST_CASE("without a partition the whole problem is the main subproblem") {
    const auto spec = parse_problem_config(kFourComponents);
    const auto subs = effective_subproblems(spec);
    REQUIRE(subs.size() == 1);
    CHECK(subs[0].kind == SubproblemSpec::Kind::Main);
    CHECK(subs[0].dimension() == 4);
  }

  TEST_CASE("invalid configurations are rejected") {
    CHECK_THROWS_AS(parse_problem_config("{"), ConfigError);
    CHECK_THROWS_AS(parse_problem_config(R"({"components": []})"), ConfigError);
    CHECK_THROWS_AS(parse_problem_config(R"({"components": [{"name": "a"}, {"name": "a"}]})"), ConfigError);
    CHECK_THROWS_AS(parse_problem_config(R"({"components": [{"name": "a", "lower": 0.7}, {"name": "b", "lower": 0.6}]})"),
                    InfeasibleError);
    CHECK_THROWS_AS(parse_problem_config(R"({"components": [{"name": "a", "upper": 0.3}, {"name": "b", "upper": 0.3}]})"),
                    InfeasibleError);
    CHECK_THROWS_AS(parse_problem_config(R"({"components": [{"name": "a", "lower": 0.5, "upper": 0.2}]})"),
                    ConfigError);
    // Five components need a partition.
    CHECK_THROWS_AS(parse_problem_config(
                        R"({"components": [{"name": "a"}, {"name": "b"}, {"name": "c"}, {"name": "d"}, {"name": "e"}]})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_problem_config(R"({"components": [{"name": "a"}], "budget": 0})"), ConfigError);
  }

  TEST_CASE("partition errors name the problem") {
    std::string text = kNineComponents;
    // Drop the metal group: its aggregate is left without members.
    const auto cut = text.find(R"(,
    {"kind": "group", "name": "metal")");
    text = text.substr(0, cut) + "\n  ]\n}";
    CHECK_THROWS_AS(parse_problem_config(text), ConfigError);
  }

  TEST_CASE("experiment CSV loads in component order") {
    const auto spec = parse_problem_config(kFourComponents);
    const auto data = parse_experiment_csv("\xEF\xBB\xBF" "metal,PhA,amino,PA-56,note\n0.05,0.01,0.04,0.9,7\n", spec);
    REQUIRE(data.size() == 1);
    CHECK(data.rows(0, 0) == 0.9);
    CHECK(data.rows(0, 3) == 0.05);
    CHECK(data.out_of_bounds_rows.empty());
  }

  TEST_CASE("CSV errors carry file and line") {
    const auto spec = parse_problem_config(kFourComponents);
    try {
      parse_experiment_csv("PA-56,PhA,amino,metal\n0.9,0.05,0.05,0\n0.9,x,0.05,0.05\n", spec, {}, "exp.csv");
      FAIL("expected a DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("exp.csv:3") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_experiment_csv("PA-56,PhA,amino\n0.9,0.05,0.05\n", spec), DataError);
    CHECK_THROWS_AS(parse_experiment_csv("", spec), DataError);
  }

  TEST_CASE("rows off the simplex are listed, or renormalized when lenient") {
    const auto spec = parse_problem_config(kFourComponents);
    const std::string text = "PA-56,PhA,amino,metal\n0.9,0.05,0.05,0.05\n0.8,0.05,0.05,0.05\n";
    try {
      parse_experiment_csv(text, spec);
      FAIL("expected a DataError");
    } catch (const DataError& e) {
      const std::string what = e.what();
      CHECK(what.find("line 2") != std::string::npos);
      CHECK(what.find("line 3") != std::string::npos);
    }
    LoadOptions lenient;
    lenient.lenient = true;
    const auto data = parse_experiment_csv(text, spec, lenient);
    CHECK(data.renormalized_rows.size() == 2);
    CHECK(data.rows.row(0).sum() == doctest::Approx(1.0));
  }

  TEST_CASE("out-of-bounds rows are kept and flagged") {
    const auto spec = parse_problem_config(kFourComponents);
    const auto data = parse_experiment_csv("PA-56,PhA,amino,metal\n0.7,0.05,0.1,0.15\n0.9,0.0,0.05,0.05\n", spec);
    CHECK(data.size() == 2);
    REQUIRE(data.out_of_bounds_rows.size() == 1);
    CHECK(data.out_of_bounds_rows[0] == 0);
  }

  TEST_CASE("rescaling to a group divides by the group's mass") {
    const auto spec = parse_problem_config(kNineComponents);
    ExperimentDataset data = empty_dataset(spec);
    data.rows = SampleMatrix(2, 9);
    data.rows << 0.85, 0.03, 0.02, 0.0, 0.0, 0.03, 0.0, 0.07, 0.0,  //
        0.9, 0.1, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0;
    const auto amino = rescale_dataset_to_subproblem(data, spec, spec.partition[1]);
    REQUIRE(amino.size() == 1);  // second row has no amino mass
    CHECK(amino.rows(0, 0) == doctest::Approx(0.4));
    CHECK(amino.rows(0, 3) == doctest::Approx(0.6));
    const auto main = rescale_dataset_to_subproblem(data, spec, spec.partition[0]);
    REQUIRE(main.size() == 2);
    CHECK(main.rows(0, 2) == doctest::Approx(0.05));
    CHECK(main.rows(0, 3) == doctest::Approx(0.07));
  }
}
