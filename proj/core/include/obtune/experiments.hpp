#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "obtune/space.hpp"

namespace obtune {

// The black box under tuning. Must return a quality in [0, 1] and be
// deterministic; stochastic objectives fold their own seed into the closure.
// serial_only opts out of concurrent bootstrap evaluation.
struct Objective {
  std::function<double(const HyperParamVector&)> fn;
  std::string name = "objective";
  bool expensive = false;  // reporting note only, never changes behavior
  bool serial_only = false;

  double operator()(const HyperParamVector& hp) const { return fn(hp); }
};

struct ExperimentRecord {
  std::size_t index = 0;
  HyperParamVector hp;
  double quality = 0.0;
};

// Ordered bootstrap evidence: the mappers' training set. Records keep the
// 0..len-1 index order they were drawn in. The verification counter tracks
// true-objective calls made after bootstrap so budgets stay honest.
class ExperimentLog {
public:
  ExperimentLog(HyperParamSpace space, std::uint64_t seed)
      : space_(std::move(space)), seed_(seed) {}

  const HyperParamSpace& space() const { return space_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<ExperimentRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }

  // Validates against the space, rejects qualities outside [0, 1].
  void append(HyperParamVector hp, double quality);

  void add_verification_evals(std::size_t n) { verification_evals_ += n; }
  std::size_t verification_evals() const { return verification_evals_; }

  // Order-sensitive hash over seed, space digest and record bit patterns.
  std::uint64_t digest() const;

private:
  HyperParamSpace space_;
  std::uint64_t seed_;
  std::vector<ExperimentRecord> records_;
  std::size_t verification_evals_ = 0;
};

// The objective broke its contract: threw, or returned a quality outside
// [0, 1]. Carries the failing record index and whatever prefix of the log
// completed before the failure.
class ObjectiveError : public std::runtime_error {
public:
  enum class Kind { EvaluationFailed, QualityOutOfRange };

  ObjectiveError(Kind kind, std::size_t index, std::string detail,
                 std::shared_ptr<const ExperimentLog> partial = nullptr)
      : std::runtime_error(describe(kind, index, detail)),
        kind_(kind),
        index_(index),
        detail_(std::move(detail)),
        partial_(std::move(partial)) {}

  Kind kind() const { return kind_; }
  std::size_t index() const { return index_; }
  const std::string& detail() const { return detail_; }

  // Completed records 0..index-1, or null outside bootstrap context.
  const std::shared_ptr<const ExperimentLog>& partial_log() const {
    return partial_;
  }

private:
  static std::string describe(Kind kind, std::size_t index,
                              const std::string& detail);

  Kind kind_;
  std::size_t index_;
  std::string detail_;
  std::shared_ptr<const ExperimentLog> partial_;
};

// Runs `count` seeded random experiments. Record i's draw comes from its own
// substream seeded with mix(seed, i), so concurrent and serial execution
// produce identical logs. Throws ObjectiveError at the lowest failing index.
ExperimentLog run_bootstrap(const HyperParamSpace& space, const Objective& obj,
                            std::size_t count, std::uint64_t seed,
                            bool parallel = true);

// True-objective calls behind a log: bootstrap records plus verifications.
std::size_t evaluation_budget(const ExperimentLog& log);

// Wraps an objective with an exact call counter for budget accounting.
class CountingObjective {
public:
  explicit CountingObjective(Objective inner) : inner_(std::move(inner)) {}

  double operator()(const HyperParamVector& hp) const {
    count_.fetch_add(1, std::memory_order_relaxed);
    return inner_(hp);
  }

  std::size_t count() const { return count_.load(std::memory_order_relaxed); }

  // View over this wrapper; the counter keeps counting through it.
  Objective as_objective() const {
    Objective o = inner_;
    o.fn = [this](const HyperParamVector& hp) { return (*this)(hp); };
    return o;
  }

  const Objective& inner() const { return inner_; }

private:
  Objective inner_;
  mutable std::atomic<std::size_t> count_{0};
};

}  // namespace obtune
