#include "obtune/multipass.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "obtune/random.hpp"

namespace obtune {

const char* to_string(MultiPassTermination t) {
  return t == MultiPassTermination::TargetReached ? "target_reached"
                                                  : "max_stagnation";
}

QStepStrategy QStepStrategy::constant(double step) {
  if (!(step > 0.0 && step <= 1.0))
    throw std::invalid_argument("constant q_step must lie in (0, 1]");
  QStepStrategy s;
  s.kind = Kind::Constant;
  s.step = step;
  return s;
}

QStepStrategy QStepStrategy::decaying(double initial, double factor) {
  if (!(initial > 0.0))
    throw std::invalid_argument("decaying q_step initial must be > 0");
  if (!(factor > 0.0 && factor < 1.0))
    throw std::invalid_argument("decaying q_step factor must lie in (0, 1)");
  QStepStrategy s;
  s.kind = Kind::Decaying;
  s.initial = initial;
  s.factor = factor;
  return s;
}

double get_q_step(const QStepStrategy& strategy, std::size_t pass_index) {
  if (strategy.kind == QStepStrategy::Kind::Constant) return strategy.step;
  // repeated multiplication, not pow: bit-identical on every platform
  double step = strategy.initial;
  for (std::size_t j = 0; j < pass_index; ++j) step *= strategy.factor;
  return step;
}

namespace {

void validate_multipass_config(const MultiPassConfig& config) {
  if (!(config.q_init >= 0.0 && config.q_init <= 1.0))
    throw std::invalid_argument("q_init must lie in [0, 1]");
  if (!(config.q_target >= config.q_init && config.q_target <= 1.0))
    throw std::invalid_argument("q_target must lie in [q_init, 1]");
  if (config.max_stagnation == 0)
    throw std::invalid_argument("max_stagnation must be >= 1");
  const QStepStrategy& s = config.step;
  if (s.kind == QStepStrategy::Kind::Constant) {
    if (!(s.step > 0.0 && s.step <= 1.0))
      throw std::invalid_argument("constant q_step must lie in (0, 1]");
  } else {
    if (!(s.initial > 0.0))
      throw std::invalid_argument("decaying q_step initial must be > 0");
    if (!(s.factor > 0.0 && s.factor < 1.0))
      throw std::invalid_argument("decaying q_step factor must lie in (0, 1)");
    // A decaying series sums to initial/(1-factor). If that can never lift
    // q_ex to q_target, q_ex plateaus below it and passes that keep
    // reaching the plateau would cycle forever; such configs are rejected
    // rather than silently capped.
    if (config.q_init + s.initial / (1.0 - s.factor) < config.q_target)
      throw std::invalid_argument(
          "decaying q_step sums short of q_target; raise initial/factor "
          "or lower q_target");
  }
}

}  // namespace

MultiPassResult multi_pass_adjust(const Observer& observer,
                                  const HyperParamSpace& space,
                                  const MultiPassConfig& config) {
  validate_multipass_config(config);

  MultiPassResult result;
  double q_ex = config.q_init;
  std::size_t stagnation = 0;
  std::size_t pass = 0;
  std::optional<HyperParamVector> start;
  double min_step = 1.0;
  std::size_t total_iterations = 0;

  // The first pass always runs; the loop condition is re-checked after
  // every pass, target before stagnation, matching the while-clause order.
  while (true) {
    BasicTunerConfig inner = config.inner;
    inner.q_ex = q_ex;
    inner.seed = mix(config.inner.seed, pass);
    TuneResult pass_result = basic_adjust(observer, space, inner, start);
    total_iterations += pass_result.iterations;

    const double pass_q_best = pass_result.q_best;
    if (pass == 0 || pass_q_best > result.q_best) {
      result.q_best = pass_q_best;
      result.hp_best = pass_result.hp_best;
    }
    if (config.warm_start) start = pass_result.hp_best;

    stagnation = pass_q_best < q_ex ? stagnation + 1 : 0;
    result.passes.push_back(
        {pass, q_ex, std::move(pass_result), stagnation});

    const double step = get_q_step(config.step, pass);
    min_step = std::min(min_step, step);
    q_ex = std::min(q_ex + step, 1.0);
    ++pass;

    if (pass_q_best >= config.q_target) {
      result.termination = MultiPassTermination::TargetReached;
      break;
    }
    if (stagnation >= config.max_stagnation) {
      result.termination = MultiPassTermination::MaxStagnation;
      break;
    }
  }

  result.stagnation = stagnation;

  // both bounds hold by construction; a violation means the loop is broken
  if (total_iterations > result.passes.size() * config.inner.max_iterations)
    throw std::logic_error("multi-pass iteration bound violated");
  const std::size_t pass_bound =
      config.max_stagnation +
      static_cast<std::size_t>(
          std::ceil((config.q_target - config.q_init) / min_step));
  if (result.passes.size() > pass_bound)
    throw std::logic_error("multi-pass pass-count bound violated");

  return result;
}

}  // namespace obtune
