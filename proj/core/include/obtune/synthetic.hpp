#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "obtune/experiments.hpp"
#include "obtune/space.hpp"

namespace obtune {

// One peak of a bump landscape, in normalized coordinates.
struct Bump {
  std::vector<double> center;  // each coordinate in [0,1]
  double width = 0.08;         // squared-distance scale, > 0
  double height = 1.0;         // peak value, in (0,1]
};

// Analytic stand-ins for a real training run: cheap, pure, codomain [0,1],
// defined over the normalized unit cube of whatever space they are paired
// with. The noisy variant derives its noise from (seed, hp bits), so equal
// inputs always get equal noise.
class SyntheticObjective {
public:
  enum class Kind { Constant, GaussianBump, MultiBump, PlateauStep, NoisyBump };

  static SyntheticObjective constant(double value);
  // q = exp(-sum_i (u_i - c_i)^2 / w); exactly 1.0 at the center
  static SyntheticObjective gaussian_bump(std::vector<double> center,
                                          double width);
  // q = max over bumps of height_j * exp(...); one height must be 1.0
  static SyntheticObjective multi_bump(std::vector<Bump> bumps);
  // q = mean(u) >= threshold ? high : low
  static SyntheticObjective plateau_step(double threshold, double low,
                                         double high);
  // gaussian_bump plus clamped seeded Gaussian noise
  static SyntheticObjective noisy_bump(std::vector<double> center, double width,
                                       double noise_sd, std::uint64_t seed);

  double evaluate(const HyperParamSpace& space, const HyperParamVector& hp) const;

  Kind kind() const { return kind_; }
  std::size_t dimension() const { return dimension_; }  // 0 = any
  std::string name() const;

  // Closure over a fixed space, in the shape run_bootstrap wants.
  Objective bind(const HyperParamSpace& space) const;

private:
  SyntheticObjective() = default;

  Kind kind_ = Kind::Constant;
  std::size_t dimension_ = 0;
  double value_ = 0.5;
  std::vector<Bump> bumps_;
  double threshold_ = 0.5;
  double low_ = 0.2;
  double high_ = 0.9;
  double noise_sd_ = 0.0;
  std::uint64_t seed_ = 0;
};

// The benchmark every calibration and comparison in this repo runs on:
// smooth, unimodal, optimum off any coarse lattice.
HyperParamSpace canonical_space();
SyntheticObjective canonical_objective();

struct BaselineResult {
  HyperParamVector hp_best;
  double q_best = 0.0;
  std::size_t budget_used = 0;
};

// budget seeded uniform draws, first maximum wins
BaselineResult run_random_search(const HyperParamSpace& space,
                                 const Objective& obj, std::size_t budget,
                                 std::uint64_t seed);

// Axis-aligned lattice with the largest per-axis count m such that m^n fits
// the budget; axis values are u = j/(m-1) through denormalization (m = 1
// degenerates to u = 0.5). Row-major, axis 0 most significant; first maximum
// wins.
BaselineResult run_grid_search(const HyperParamSpace& space,
                               const Objective& obj, std::size_t budget);

struct BaselineSearcher {
  enum class Kind { RandomSearch, GridSearch };

  Kind kind = Kind::RandomSearch;
  std::size_t budget = 100;
  std::uint64_t seed = 0;
};

const char* to_string(BaselineSearcher::Kind kind);

BaselineResult run_baseline(const BaselineSearcher& searcher,
                            const HyperParamSpace& space, const Objective& obj);

// One method's aggregate over the comparison seeds.
struct ComparisonRow {
  std::string method;
  double mean_quality = 0.0;
  double min_quality = 0.0;
  double max_quality = 0.0;
  std::size_t budget_allocated = 0;
  std::size_t budget_used = 0;  // true-objective calls, instrumented
  std::size_t runs = 0;
};

struct ComparisonTable {
  std::size_t budget = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<ComparisonRow> rows;
};

// Runs the observer pipeline (bootstrap budget-1, fit, tune, verify with the
// last call) and both baselines at the same true-evaluation budget, once per
// seed. Qualities are ground truth at each method's hp_best.
ComparisonTable compare_tuners(const HyperParamSpace& space,
                               const SyntheticObjective& obj,
                               std::size_t budget,
                               const std::vector<std::uint64_t>& seeds);

std::string format_comparison(const ComparisonTable& table);

}  // namespace obtune
