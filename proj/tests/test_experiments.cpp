#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "obtune/experiments.hpp"
#include "obtune/random.hpp"

using namespace obtune;

namespace {

HyperParamSpace small_space() {
  return HyperParamSpace({{"a", ParamKind::Continuous, 0.0, 1.0, {}},
                          {"b", ParamKind::Integer, 1, 8, {}}});
}

Objective mean_objective() {
  return {[](const HyperParamVector& hp) { return (hp[0] + hp[1] / 8.0) / 2.0; },
          "mean"};
}

}  // namespace

TEST_CASE("bootstrap is deterministic in the seed") {
  const HyperParamSpace space = small_space();
  const ExperimentLog a = run_bootstrap(space, mean_objective(), 40, 7);
  const ExperimentLog b = run_bootstrap(space, mean_objective(), 40, 7);
  const ExperimentLog c = run_bootstrap(space, mean_objective(), 40, 8);
  REQUIRE(a.size() == 40);
  CHECK(a.digest() == b.digest());
  CHECK(a.digest() != c.digest());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.records()[i].index == i);
    CHECK(space.contains(a.records()[i].hp));
    CHECK(a.records()[i].hp == b.records()[i].hp);
  }
}

TEST_CASE("parallel and serial bootstrap agree bit for bit") {
  const HyperParamSpace space = small_space();
  const ExperimentLog par = run_bootstrap(space, mean_objective(), 100, 3, true);
  const ExperimentLog ser =
      run_bootstrap(space, mean_objective(), 100, 3, false);
  CHECK(par.digest() == ser.digest());
}

TEST_CASE("bootstrap rejects a zero count") {
  CHECK_THROWS_AS(run_bootstrap(small_space(), mean_objective(), 0, 1),
                  std::invalid_argument);
}

TEST_CASE("a throwing objective reports the lowest failing index") {
  const HyperParamSpace space = small_space();
  Objective flaky{[](const HyperParamVector& hp) -> double {
                    if (hp[1] >= 7.0) throw std::runtime_error("diverged");
                    return 0.5;
                  },
                  "flaky"};
  std::vector<std::size_t> failing_indices;
  for (const bool parallel : {false, true}) {
    CAPTURE(parallel);
    try {
      run_bootstrap(space, flaky, 60, 21, parallel);
      FAIL("expected ObjectiveError");
    } catch (const ObjectiveError& e) {
      CHECK(e.kind() == ObjectiveError::Kind::EvaluationFailed);
      CHECK(e.detail() == "diverged");
      REQUIRE(e.partial_log() != nullptr);
      CHECK(e.partial_log()->size() == e.index());
      for (std::size_t i = 0; i < e.partial_log()->size(); ++i)
        CHECK(e.partial_log()->records()[i].index == i);
      failing_indices.push_back(e.index());
    }
  }
  // the failing index is the first draw the objective rejects, a pure
  // function of the seed: both execution modes must agree on it
  REQUIRE(failing_indices.size() == 2);
  CHECK(failing_indices[0] == failing_indices[1]);
}

TEST_CASE("an out-of-range quality is an objective contract breach") {
  Objective wild{[](const HyperParamVector&) { return 1.5; }, "wild"};
  try {
    run_bootstrap(small_space(), wild, 5, 1);
    FAIL("expected ObjectiveError");
  } catch (const ObjectiveError& e) {
    CHECK(e.kind() == ObjectiveError::Kind::QualityOutOfRange);
    CHECK(e.index() == 0);
  }
}

TEST_CASE("append validates records") {
  ExperimentLog log(small_space(), 0);
  CHECK_THROWS_AS(log.append(HyperParamVector({0.5}), 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(log.append(HyperParamVector({0.5, 4.0}), 1.5),
                  ObjectiveError);
  CHECK_THROWS_AS(log.append(HyperParamVector({0.5, 4.0}), std::nan("")),
                  ObjectiveError);
  log.append(HyperParamVector({0.5, 4.0}), 1.0);
  CHECK(log.size() == 1);
}

TEST_CASE("budget counts bootstrap plus verification calls") {
  ExperimentLog log = run_bootstrap(small_space(), mean_objective(), 10, 2);
  CHECK(evaluation_budget(log) == 10);
  log.add_verification_evals(3);
  CHECK(evaluation_budget(log) == 13);
  CHECK(log.verification_evals() == 3);
}

TEST_CASE("counting objective counts through its view") {
  const CountingObjective counter(mean_objective());
  const Objective view = counter.as_objective();
  const ExperimentLog log = run_bootstrap(small_space(), view, 25, 9);
  CHECK(counter.count() == 25);
  CHECK(log.size() == 25);
}
