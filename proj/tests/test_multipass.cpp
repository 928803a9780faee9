#include <stdexcept>

#include <doctest.h>

#include "obtune/multipass.hpp"
#include "obtune/space.hpp"
#include "support/stubs.hpp"

using namespace obtune;
using obtune::test::StubObserver;
using obtune::test::constant_observer;

namespace {

HyperParamSpace unit_space(std::size_t n) {
  std::vector<ParamSpec> params;
  for (std::size_t i = 0; i < n; ++i)
    params.push_back({"u" + std::to_string(i), ParamKind::Continuous, 0.0,
                      1.0, {}});
  return HyperParamSpace(std::move(params));
}

}  // namespace

TEST_CASE("q-step strategies produce exact values") {
  const QStepStrategy constant = QStepStrategy::constant(0.05);
  CHECK(get_q_step(constant, 0) == 0.05);
  CHECK(get_q_step(constant, 7) == 0.05);

  const QStepStrategy decaying = QStepStrategy::decaying(0.1, 0.5);
  CHECK(get_q_step(decaying, 0) == 0.1);
  CHECK(get_q_step(decaying, 1) == 0.05);
  CHECK(get_q_step(decaying, 2) == 0.025);
  CHECK(get_q_step(decaying, 3) == 0.0125);
}

TEST_CASE("q-step factories reject bad shapes") {
  CHECK_THROWS_AS(QStepStrategy::constant(0.0), std::invalid_argument);
  CHECK_THROWS_AS(QStepStrategy::constant(1.5), std::invalid_argument);
  CHECK_THROWS_AS(QStepStrategy::decaying(0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(QStepStrategy::decaying(0.1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(QStepStrategy::decaying(0.1, 1.0), std::invalid_argument);
}

// Stub trace: map_q constant 1.0. The first pass reaches 1.0 >= q_target,
// so exactly one pass runs.
TEST_CASE("multi-pass exits after the first pass when it qualifies") {
  const HyperParamSpace space = unit_space(2);
  const StubObserver observer = constant_observer(space, 1.0);
  MultiPassConfig config;
  config.q_init = 0.5;
  config.q_target = 0.9;

  const MultiPassResult result = multi_pass_adjust(observer, space, config);
  REQUIRE(result.passes.size() == 1);
  CHECK(result.q_best == 1.0);
  CHECK(result.termination == MultiPassTermination::TargetReached);
  CHECK(result.passes[0].q_ex == 0.5);
  CHECK(result.stagnation == 0);
}

// Stub trace: map_q constant 0.2 never reaches any q_ex, so stagnation
// climbs one per pass while q_ex walks 0.5, 0.6.
TEST_CASE("multi-pass stops after max_stagnation failing passes") {
  const HyperParamSpace space = unit_space(2);
  const StubObserver observer = constant_observer(space, 0.2);
  MultiPassConfig config;
  config.q_init = 0.5;
  config.q_target = 1.0;
  config.step = QStepStrategy::constant(0.1);
  config.max_stagnation = 2;
  config.inner.max_idle = 3;
  config.inner.min_contribution = 0.01;

  const MultiPassResult result = multi_pass_adjust(observer, space, config);
  REQUIRE(result.passes.size() == 2);
  CHECK(result.termination == MultiPassTermination::MaxStagnation);
  CHECK(result.stagnation == 2);
  CHECK(result.q_best == 0.2);
  CHECK(result.passes[0].q_ex == 0.5);
  CHECK(result.passes[1].q_ex == 0.6);
  CHECK(result.passes[0].stagnation_after == 1);
  CHECK(result.passes[1].stagnation_after == 2);
}

// Stub trace: q_init 0.95 with step 0.1 must clamp the second q_ex to 1.0.
TEST_CASE("the q_ex ladder clamps at 1.0") {
  const HyperParamSpace space = unit_space(2);
  const StubObserver observer = constant_observer(space, 0.2);
  MultiPassConfig config;
  config.q_init = 0.95;
  config.q_target = 1.0;
  config.step = QStepStrategy::constant(0.1);
  config.max_stagnation = 2;
  config.inner.max_idle = 3;
  config.inner.min_contribution = 0.01;

  const MultiPassResult result = multi_pass_adjust(observer, space, config);
  REQUIRE(result.passes.size() == 2);
  CHECK(result.passes[0].q_ex == 0.95);
  CHECK(result.passes[1].q_ex == 1.0);
}

TEST_CASE("multi-pass config validation") {
  const HyperParamSpace space = unit_space(1);
  const StubObserver observer = constant_observer(space, 0.5);

  MultiPassConfig config;
  config.q_init = 0.8;
  config.q_target = 0.5;
  CHECK_THROWS_AS(multi_pass_adjust(observer, space, config),
                  std::invalid_argument);

  config = {};
  config.max_stagnation = 0;
  CHECK_THROWS_AS(multi_pass_adjust(observer, space, config),
                  std::invalid_argument);

  // decaying steps that can never reach q_target are rejected up front:
  // 0.6 + 0.1/(1-0.5) = 0.8 < 1.0
  config = {};
  config.q_init = 0.6;
  config.q_target = 1.0;
  config.step = QStepStrategy::decaying(0.1, 0.5);
  CHECK_THROWS_AS(multi_pass_adjust(observer, space, config),
                  std::invalid_argument);

  // the same geometric ladder is fine against a reachable target
  config.q_target = 0.75;
  CHECK_NOTHROW(multi_pass_adjust(observer, space, config));
}

TEST_CASE("warm start chains passes through hp_best") {
  // quality is coordinate 0; proposals nudge it up a little each time. A
  // warm-started run keeps climbing across passes; a cold-started run
  // re-rolls and depends only on the pass seed.
  const HyperParamSpace space = unit_space(1);
  const StubObserver observer(
      space,
      [](const HyperParamSpace&, const HyperParamVector& hp) { return hp[0]; },
      [](const HyperParamSpace&, std::size_t, const HyperParamVector& hp,
         double) { return clamp01(hp[0] + 0.05); });

  MultiPassConfig config;
  config.q_init = 0.3;
  config.q_target = 1.0;
  config.step = QStepStrategy::constant(0.2);
  config.max_stagnation = 3;
  config.inner.max_idle = 2;
  config.inner.max_iterations = 4;  // at most +0.2 of progress per pass
  config.inner.min_contribution = 0.01;
  config.inner.seed = 12;

  const MultiPassResult warm = multi_pass_adjust(observer, space, config);
  config.warm_start = false;
  const MultiPassResult cold = multi_pass_adjust(observer, space, config);

  REQUIRE(warm.passes.size() > 1);
  // warm passes resume from the previous best, so pass starts never regress
  for (std::size_t p = 1; p < warm.passes.size(); ++p)
    CHECK(warm.passes[p].result.initial_hp ==
          warm.passes[p - 1].result.hp_best);
  // cold passes re-randomize: the second pass's start ignores pass 1's best
  REQUIRE(cold.passes.size() > 1);
  CHECK(cold.passes[1].result.initial_hp !=
        cold.passes[0].result.hp_best);
  // global q_best is the max across passes either way
  for (const MultiPassResult* r : {&warm, &cold}) {
    double best = 0.0;
    for (const PassOutcome& pass : r->passes)
      best = std::max(best, pass.result.q_best);
    CHECK(r->q_best == best);
  }
}

TEST_CASE("pass seeds differ so cold passes explore differently") {
  const HyperParamSpace space = unit_space(2);
  // flat quality: every pass idles out immediately from its random start
  const StubObserver observer = constant_observer(space, 0.3);
  MultiPassConfig config;
  config.q_init = 0.5;
  config.q_target = 1.0;
  config.step = QStepStrategy::constant(0.05);
  config.max_stagnation = 3;
  config.warm_start = false;
  config.inner.max_idle = 1;
  config.inner.min_contribution = 0.01;
  config.inner.seed = 77;

  const MultiPassResult result = multi_pass_adjust(observer, space, config);
  REQUIRE(result.passes.size() == 3);
  CHECK(result.passes[0].result.initial_hp !=
        result.passes[1].result.initial_hp);
  CHECK(result.passes[1].result.initial_hp !=
        result.passes[2].result.initial_hp);
}

TEST_CASE("multi-pass runs are deterministic") {
  const HyperParamSpace space = unit_space(2);
  const StubObserver observer(
      space,
      [](const HyperParamSpace&, const HyperParamVector& hp) {
        return clamp01((hp[0] + hp[1]) / 2.0);
      },
      [](const HyperParamSpace&, std::size_t i, const HyperParamVector& hp,
         double q_ex) { return clamp01(hp[i] * 0.5 + q_ex * 0.5); });
  MultiPassConfig config;
  config.q_init = 0.4;
  config.q_target = 0.99;
  config.inner.seed = 3;

  const MultiPassResult a = multi_pass_adjust(observer, space, config);
  const MultiPassResult b = multi_pass_adjust(observer, space, config);
  CHECK(a.q_best == b.q_best);
  CHECK(a.hp_best == b.hp_best);
  CHECK(a.passes.size() == b.passes.size());
  CHECK(a.termination == b.termination);
}
