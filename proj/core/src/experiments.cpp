#include "obtune/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <optional>
#include <thread>

#include "obtune/hash.hpp"
#include "obtune/random.hpp"

namespace obtune {

void ExperimentLog::append(HyperParamVector hp, double quality) {
  space_.require_valid(hp);
  if (!(quality >= 0.0 && quality <= 1.0))
    throw ObjectiveError(ObjectiveError::Kind::QualityOutOfRange,
                         records_.size(),
                         "quality " + std::to_string(quality));
  records_.push_back({records_.size(), std::move(hp), quality});
}

std::uint64_t ExperimentLog::digest() const {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  h = fnv1a64_u64(seed_, h);
  h = fnv1a64_u64(space_.digest(), h);
  for (const ExperimentRecord& r : records_) {
    h = fnv1a64_u64(r.index, h);
    for (double v : r.hp.values) h = fnv1a64_double(v, h);
    h = fnv1a64_double(r.quality, h);
  }
  return h;
}

std::string ObjectiveError::describe(Kind kind, std::size_t index,
                                     const std::string& detail) {
  std::string what = kind == Kind::EvaluationFailed
                         ? "objective evaluation failed"
                         : "objective quality outside [0, 1]";
  what += " at record " + std::to_string(index);
  if (!detail.empty()) what += ": " + detail;
  return what;
}

namespace {

struct EvalFailure {
  ObjectiveError::Kind kind;
  std::string detail;
};

// One record's draw and evaluation, independent of every other record.
HyperParamVector draw_record(const HyperParamSpace& space, std::uint64_t seed,
                             std::size_t index) {
  SplitMix64 rng(mix(seed, index));
  return space.sample(rng);
}

std::optional<EvalFailure> evaluate_record(const Objective& obj,
                                           const HyperParamVector& hp,
                                           double& quality) {
  try {
    quality = obj(hp);
  } catch (const std::exception& e) {
    return EvalFailure{ObjectiveError::Kind::EvaluationFailed, e.what()};
  } catch (...) {
    return EvalFailure{ObjectiveError::Kind::EvaluationFailed,
                       "unknown exception"};
  }
  if (!(quality >= 0.0 && quality <= 1.0))
    return EvalFailure{ObjectiveError::Kind::QualityOutOfRange,
                       "got " + std::to_string(quality)};
  return std::nullopt;
}

[[noreturn]] void throw_bootstrap_failure(
    const HyperParamSpace& space, std::uint64_t seed, std::size_t fail_index,
    EvalFailure failure, const std::vector<HyperParamVector>& draws,
    const std::vector<double>& qualities) {
  auto partial = std::make_shared<ExperimentLog>(space, seed);
  for (std::size_t i = 0; i < fail_index; ++i)
    partial->append(draws[i], qualities[i]);
  throw ObjectiveError(failure.kind, fail_index, std::move(failure.detail),
                       std::move(partial));
}

}  // namespace

ExperimentLog run_bootstrap(const HyperParamSpace& space, const Objective& obj,
                            std::size_t count, std::uint64_t seed,
                            bool parallel) {
  if (count == 0) throw std::invalid_argument("bootstrap count must be >= 1");

  std::vector<HyperParamVector> draws(count);
  for (std::size_t i = 0; i < count; ++i)
    draws[i] = draw_record(space, seed, i);

  std::vector<double> qualities(count, 0.0);

  const unsigned hw = std::thread::hardware_concurrency();
  const std::size_t workers =
      (parallel && !obj.serial_only && hw > 1)
          ? std::min<std::size_t>({hw, count, 16})
          : 1;

  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      if (auto failure = evaluate_record(obj, draws[i], qualities[i]))
        throw_bootstrap_failure(space, seed, i, std::move(*failure), draws,
                                qualities);
    }
  } else {
    // Every index gets evaluated even when one fails; the lowest failing
    // index is reported afterwards, so the partial log is a clean prefix
    // and the error is independent of scheduling.
    std::vector<std::optional<EvalFailure>> failures(count);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      for (std::size_t i = next.fetch_add(1); i < count;
           i = next.fetch_add(1))
        failures[i] = evaluate_record(obj, draws[i], qualities[i]);
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
    for (std::size_t i = 0; i < count; ++i) {
      if (failures[i])
        throw_bootstrap_failure(space, seed, i, std::move(*failures[i]),
                                draws, qualities);
    }
  }

  ExperimentLog log(space, seed);
  for (std::size_t i = 0; i < count; ++i)
    log.append(std::move(draws[i]), qualities[i]);
  return log;
}

std::size_t evaluation_budget(const ExperimentLog& log) {
  return log.size() + log.verification_evals();
}

}  // namespace obtune
