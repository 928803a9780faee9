#pragma once

#include <cstdint>
#include <vector>

#include "obtune/observer.hpp"

namespace obtune {

// How much the expected quality rises between passes.
struct QStepStrategy {
  enum class Kind { Constant, Decaying };

  Kind kind = Kind::Constant;
  double step = 0.05;     // constant: the increment, in (0,1]
  double initial = 0.1;   // decaying: pass-0 increment, > 0
  double factor = 0.5;    // decaying: per-pass multiplier, in (0,1)

  static QStepStrategy constant(double step);
  static QStepStrategy decaying(double initial, double factor);
};

double get_q_step(const QStepStrategy& strategy, std::size_t pass_index);

struct MultiPassConfig {
  double q_target = 1.0;
  double q_init = 0.6;  // q_init <= q_target <= 1
  QStepStrategy step;
  std::size_t max_stagnation = 3;
  // Start each pass after the first from the previous pass's hp_best.
  // False re-randomizes every pass, which is the pseudocode read verbatim;
  // true is what makes later passes continue where earlier ones stopped.
  bool warm_start = true;
  BasicTunerConfig inner;  // q_ex and seed overridden per pass
};

enum class MultiPassTermination { TargetReached, MaxStagnation };

const char* to_string(MultiPassTermination t);

struct PassOutcome {
  std::size_t pass_index = 0;
  double q_ex = 0.0;  // expected quality this pass ran against
  TuneResult result;
  std::size_t stagnation_after = 0;
};

struct MultiPassResult {
  double q_best = 0.0;  // max over passes
  HyperParamVector hp_best;
  std::vector<PassOutcome> passes;
  MultiPassTermination termination = MultiPassTermination::TargetReached;
  std::size_t stagnation = 0;  // final counter value
};

// The multi-pass driver. q_ex starts at q_init and rises by get_q_step after
// every pass, clamped at 1.0. A pass whose q_best falls short of its q_ex
// bumps the stagnation counter; reaching it resets the counter. Stops when a
// pass's q_best reaches q_target or stagnation hits max_stagnation, in that
// order of precedence. Pass p's loop seed is mix(config.inner.seed, p).
MultiPassResult multi_pass_adjust(const Observer& observer,
                                  const HyperParamSpace& space,
                                  const MultiPassConfig& config);

}  // namespace obtune
