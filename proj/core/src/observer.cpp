#include "obtune/observer.hpp"

#include <cmath>
#include <stdexcept>

#include "obtune/errors.hpp"
#include "obtune/random.hpp"

namespace obtune {

const char* to_string(StrategyKind kind) {
  return kind == StrategyKind::Basic ? "basic" : "cost_based";
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::TargetReached: return "target_reached";
    case Termination::MaxIdle: return "max_idle";
    case Termination::MaxIterations: return "max_iterations";
  }
  return "unknown";
}

MapperObserver::MapperObserver(QualityMapper quality,
                               std::vector<ParamMapper> params)
    : quality_(std::move(quality)), params_(std::move(params)) {
  if (params_.empty())
    throw std::invalid_argument("observer needs at least one param mapper");
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (params_[i].index() != i)
      throw std::invalid_argument("param mappers must arrive in index order");
    if (params_[i].space_digest() != quality_.space_digest())
      throw SpaceMismatchError(quality_.space_digest(),
                               params_[i].space_digest());
  }
}

double MapperObserver::predict_quality(const HyperParamSpace& space,
                                       const HyperParamVector& hp) const {
  if (space.digest() != quality_.space_digest())
    throw SpaceMismatchError(quality_.space_digest(), space.digest());
  return quality_.predict(hp);
}

double MapperObserver::propose_param(const HyperParamSpace& space,
                                     std::size_t i,
                                     const HyperParamVector& current,
                                     double q_ex) const {
  if (space.digest() != quality_.space_digest())
    throw SpaceMismatchError(quality_.space_digest(), space.digest());
  return params_[i].propose(current, q_ex);
}

MapperObserver fit_observer(const ExperimentLog& log, MapperKind kind,
                            const MapperParams& params) {
  QualityMapper quality = fit_quality_mapper(log, kind, params);
  std::vector<ParamMapper> mappers;
  mappers.reserve(log.space().size());
  for (std::size_t i = 0; i < log.space().size(); ++i)
    mappers.push_back(fit_param_mapper(log, i, kind, params));
  return MapperObserver(std::move(quality), std::move(mappers));
}

double contribution_basic(double q_eval_i, double q_best) {
  return q_eval_i - q_best;
}

double contribution_cost(double q_eval_i, double q_best,
                         const CostFunction& theta, double hp_eval_i) {
  return (q_eval_i - q_best) * (1.0 - theta(hp_eval_i));
}

std::size_t select_index_basic(const std::vector<double>& q_eval) {
  if (q_eval.empty()) throw std::invalid_argument("q_eval must be nonempty");
  std::size_t idx = 0;
  for (std::size_t i = 1; i < q_eval.size(); ++i)
    if (q_eval[idx] < q_eval[i]) idx = i;
  return idx;
}

std::size_t select_index_cost(const std::vector<double>& q_eval, double q_best,
                              const std::vector<double>& hp_eval,
                              const std::vector<CostFunction>& thetas) {
  if (q_eval.empty()) throw std::invalid_argument("q_eval must be nonempty");
  if (hp_eval.size() != q_eval.size() || thetas.size() != q_eval.size())
    throw std::invalid_argument("q_eval, hp_eval, thetas must align");
  std::vector<double> contribution(q_eval.size());
  for (std::size_t i = 0; i < q_eval.size(); ++i)
    contribution[i] =
        contribution_cost(q_eval[i], q_best, thetas[i], hp_eval[i]);
  std::size_t idx = 0;
  for (std::size_t i = 1; i < contribution.size(); ++i)
    if (contribution[idx] < contribution[i]) idx = i;
  return idx;
}

namespace {

void validate_tuner_config(const BasicTunerConfig& config, std::size_t n) {
  if (!(config.q_ex >= 0.0 && config.q_ex <= 1.0))
    throw std::invalid_argument("q_ex must lie in [0, 1]");
  if (!(config.min_contribution >= 0.0 && config.min_contribution <= 1.0))
    throw std::invalid_argument("min_contribution must lie in [0, 1]");
  if (config.max_iterations == 0)
    throw std::invalid_argument("max_iterations must be >= 1");
  if (config.max_idle == 0)
    throw std::invalid_argument("max_idle must be >= 1");
  if (config.strategy.kind == StrategyKind::CostBased &&
      config.strategy.costs.size() != n)
    throw std::invalid_argument(
        "cost_based strategy needs one cost function per parameter");
}

}  // namespace

TuneResult basic_adjust(const Observer& observer, const HyperParamSpace& space,
                        const BasicTunerConfig& config,
                        const std::optional<HyperParamVector>& initial) {
  const std::size_t n = space.size();
  if (observer.dimension() != n)
    throw std::invalid_argument("observer dimension differs from the space");
  if (observer.space_digest() != space.digest())
    throw SpaceMismatchError(observer.space_digest(), space.digest());
  validate_tuner_config(config, n);

  HyperParamVector hp;
  if (initial) {
    space.require_valid(*initial);
    hp = *initial;
  } else {
    SplitMix64 rng(config.seed);
    hp = space.sample(rng);
  }

  TuneResult result;
  result.initial_hp = hp;
  result.hp_best = hp;
  result.q_best = observer.predict_quality(space, hp);
  result.initial_q = result.q_best;

  std::size_t iterations = 0;
  std::size_t idle = 0;
  const bool cost_based = config.strategy.kind == StrategyKind::CostBased;

  while (result.q_best < config.q_ex && idle < config.max_idle &&
         iterations < config.max_iterations) {
    IterationTrace trace;
    trace.iteration = iterations;
    trace.hp_before = hp;
    trace.hp_eval.resize(n);
    trace.q_eval.resize(n);
    trace.contributions.resize(n);

    for (std::size_t i = 0; i < n; ++i)
      trace.hp_eval[i] = observer.propose_param(space, i, hp, config.q_ex);
    for (std::size_t i = 0; i < n; ++i) {
      HyperParamVector candidate = hp;
      candidate[i] = trace.hp_eval[i];
      trace.q_eval[i] = observer.predict_quality(space, candidate);
    }
    for (std::size_t i = 0; i < n; ++i)
      trace.contributions[i] =
          cost_based
              ? contribution_cost(trace.q_eval[i], result.q_best,
                                  config.strategy.costs[i], trace.hp_eval[i])
              : contribution_basic(trace.q_eval[i], result.q_best);

    const std::size_t idx =
        cost_based ? select_index_cost(trace.q_eval, result.q_best,
                                       trace.hp_eval, config.strategy.costs)
                   : select_index_basic(trace.q_eval);
    trace.chosen = idx;

    hp[idx] = trace.hp_eval[idx];  // the update itself is unconditional

    // Acceptance always compares the raw predicted gain, never the
    // cost-discounted one; cost shapes selection only.
    trace.accepted =
        trace.q_eval[idx] - result.q_best > config.min_contribution;
    if (trace.accepted) {
      result.q_best = trace.q_eval[idx];
      result.hp_best = hp;
      idle = 0;
    } else {
      ++idle;
    }
    ++iterations;
    trace.q_best_after = result.q_best;
    result.trajectory.push_back(std::move(trace));
  }

  result.iterations = iterations;
  result.idle = idle;
  if (result.q_best >= config.q_ex)
    result.termination = Termination::TargetReached;
  else if (idle >= config.max_idle)
    result.termination = Termination::MaxIdle;
  else
    result.termination = Termination::MaxIterations;
  return result;
}

double verify_on_objective(const TuneResult& result, const Objective& obj,
                           ExperimentLog* budget) {
  double quality = 0.0;
  try {
    quality = obj(result.hp_best);
  } catch (const std::exception& e) {
    throw ObjectiveError(ObjectiveError::Kind::EvaluationFailed, 0, e.what());
  }
  if (budget) budget->add_verification_evals(1);
  if (!(quality >= 0.0 && quality <= 1.0))
    throw ObjectiveError(ObjectiveError::Kind::QualityOutOfRange, 0,
                         "got " + std::to_string(quality));
  return quality;
}

}  // namespace obtune
