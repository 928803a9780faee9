#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "obtune/cost.hpp"
#include "obtune/random.hpp"

namespace obtune {

inline double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

enum class ParamKind { Continuous, Integer };

const char* to_string(ParamKind kind);

// One tunable parameter: a named closed interval in native units. Integer
// parameters carry whole-number bounds spanning at least two values. The
// optional cost function feeds the cost-based selection strategy.
struct ParamSpec {
  std::string name;
  ParamKind kind = ParamKind::Continuous;
  double lower = 0.0;
  double upper = 1.0;
  std::optional<CostFunction> cost;

  double span() const { return upper - lower; }
};

// One concrete assignment, one native value per parameter.
struct HyperParamVector {
  std::vector<double> values;

  HyperParamVector() = default;
  explicit HyperParamVector(std::vector<double> v) : values(std::move(v)) {}

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }

  friend bool operator==(const HyperParamVector&,
                         const HyperParamVector&) = default;
};

// Ordered, immutable description of the n tunable parameters. Index i in
// every algorithm and log refers to this ordering for the whole session.
class HyperParamSpace {
public:
  // Validates the specs; throws std::invalid_argument on a bad one.
  explicit HyperParamSpace(std::vector<ParamSpec> params);

  std::size_t size() const { return params_.size(); }
  const ParamSpec& param(std::size_t i) const { return params_[i]; }
  const std::vector<ParamSpec>& params() const { return params_; }

  bool contains(const HyperParamVector& hp) const;
  void require_valid(const HyperParamVector& hp) const;

  // One uniform draw per coordinate: a real over [lower, upper) for
  // continuous parameters, an inclusive integer for integer ones.
  HyperParamVector sample(SplitMix64& rng) const;

  std::vector<double> normalize(const HyperParamVector& hp) const;
  HyperParamVector denormalize(const std::vector<double>& unit) const;

  double normalize_coord(std::size_t i, double native) const;
  double denormalize_coord(std::size_t i, double unit) const;

  // Order-sensitive hash over names, kinds and bounds. Experiment logs and
  // fitted mappers carry it so a mapper can refuse a foreign space.
  std::uint64_t digest() const { return digest_; }

private:
  std::vector<ParamSpec> params_;
  std::uint64_t digest_ = 0;
};

}  // namespace obtune
