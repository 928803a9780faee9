#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "obtune/experiments.hpp"
#include "obtune/mappers.hpp"
#include "obtune/space.hpp"

namespace obtune {

enum class StrategyKind { Basic, CostBased };

const char* to_string(StrategyKind kind);

// How the updater picks the one coordinate to change per iteration: highest
// predicted quality, or highest cost-discounted contribution.
struct SelectionStrategy {
  StrategyKind kind = StrategyKind::Basic;
  std::vector<CostFunction> costs;  // one per parameter when cost-based

  static SelectionStrategy basic() { return {}; }
  static SelectionStrategy cost_based(std::vector<CostFunction> costs) {
    return {StrategyKind::CostBased, std::move(costs)};
  }
};

struct BasicTunerConfig {
  double q_ex = 1.0;                // target predicted quality, in [0,1]
  std::size_t max_iterations = 200;
  std::size_t max_idle = 20;
  double min_contribution = 0.001;  // in [0,1]
  SelectionStrategy strategy;
  std::uint64_t seed = 0;
};

enum class Termination { TargetReached, MaxIdle, MaxIterations };

const char* to_string(Termination t);

// Everything one loop iteration did. hp_eval[i] is coordinate i's proposal
// in native units; q_eval[i] the predicted quality of the current vector
// with coordinate i swapped for that proposal.
struct IterationTrace {
  std::size_t iteration = 0;
  HyperParamVector hp_before;
  std::vector<double> hp_eval;
  std::vector<double> q_eval;
  std::vector<double> contributions;
  std::size_t chosen = 0;
  bool accepted = false;
  double q_best_after = 0.0;
};

struct TuneResult {
  double q_best = 0.0;  // best predicted quality; ground truth never enters
  HyperParamVector hp_best;
  std::vector<IterationTrace> trajectory;
  Termination termination = Termination::TargetReached;
  HyperParamVector initial_hp;
  double initial_q = 0.0;
  std::size_t iterations = 0;
  std::size_t idle = 0;
};

// What the tuning loop needs from a fitted surrogate: per-coordinate
// proposals and quality predictions. Tests substitute stub observers.
class Observer {
public:
  virtual ~Observer() = default;

  virtual std::size_t dimension() const = 0;
  virtual std::uint64_t space_digest() const = 0;
  virtual double predict_quality(const HyperParamSpace& space,
                                 const HyperParamVector& hp) const = 0;
  // native proposal for coordinate i given the other current coordinates
  virtual double propose_param(const HyperParamSpace& space, std::size_t i,
                               const HyperParamVector& current,
                               double q_ex) const = 0;
};

// The fitted ensemble: one ParamMapper per coordinate, one shared
// QualityMapper.
class MapperObserver final : public Observer {
public:
  MapperObserver(QualityMapper quality, std::vector<ParamMapper> params);

  std::size_t dimension() const override { return params_.size(); }
  std::uint64_t space_digest() const override {
    return quality_.space_digest();
  }
  double predict_quality(const HyperParamSpace& space,
                         const HyperParamVector& hp) const override;
  double propose_param(const HyperParamSpace& space, std::size_t i,
                       const HyperParamVector& current,
                       double q_ex) const override;

  const QualityMapper& quality_mapper() const { return quality_; }
  const std::vector<ParamMapper>& param_mappers() const { return params_; }

private:
  QualityMapper quality_;
  std::vector<ParamMapper> params_;
};

// Fits the whole ensemble off one log.
MapperObserver fit_observer(const ExperimentLog& log, MapperKind kind,
                            const MapperParams& params = {});

// selection scores; both live in [-1, 1] for in-range inputs
double contribution_basic(double q_eval_i, double q_best);
double contribution_cost(double q_eval_i, double q_best,
                         const CostFunction& theta, double hp_eval_i);

// argmax scans with a strict comparison, so the lowest index wins ties
std::size_t select_index_basic(const std::vector<double>& q_eval);
std::size_t select_index_cost(const std::vector<double>& q_eval, double q_best,
                              const std::vector<double>& hp_eval,
                              const std::vector<CostFunction>& thetas);

// The single-pass tuning loop. Starts from `initial` when given (multi-pass
// warm starts), otherwise from a seeded random draw. Runs purely against the
// observer's predictions until the target is reached, progress stalls for
// max_idle iterations, or max_iterations pass. Throws SpaceMismatchError if
// the observer was fitted on a different space.
TuneResult basic_adjust(const Observer& observer, const HyperParamSpace& space,
                        const BasicTunerConfig& config,
                        const std::optional<HyperParamVector>& initial = {});

// Ground truth at hp_best; the one true-objective call a tuning session
// makes. Counted against `budget` when given. Throws ObjectiveError.
double verify_on_objective(const TuneResult& result, const Objective& obj,
                           ExperimentLog* budget = nullptr);

}  // namespace obtune
