#include "obtune/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "obtune/hash.hpp"
#include "obtune/observer.hpp"
#include "obtune/random.hpp"

namespace obtune {

namespace {

void validate_center(const std::vector<double>& center) {
  if (center.empty())
    throw std::invalid_argument("bump center must be nonempty");
  for (double c : center)
    if (!(c >= 0.0 && c <= 1.0))
      throw std::invalid_argument("bump center must lie in the unit cube");
}

double bump_value(const Bump& bump, const std::vector<double>& u) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double delta = u[i] - bump.center[i];
    d2 += delta * delta;
  }
  // exactly bump.height at the center: exp(-0.0) == 1.0
  return bump.height * std::exp(-d2 / bump.width);
}

}  // namespace

SyntheticObjective SyntheticObjective::constant(double value) {
  if (!(value >= 0.0 && value <= 1.0))
    throw std::invalid_argument("constant quality must lie in [0, 1]");
  SyntheticObjective o;
  o.kind_ = Kind::Constant;
  o.value_ = value;
  return o;
}

SyntheticObjective SyntheticObjective::gaussian_bump(
    std::vector<double> center, double width) {
  validate_center(center);
  if (!(width > 0.0)) throw std::invalid_argument("bump width must be > 0");
  SyntheticObjective o;
  o.kind_ = Kind::GaussianBump;
  o.dimension_ = center.size();
  o.bumps_.push_back({std::move(center), width, 1.0});
  return o;
}

SyntheticObjective SyntheticObjective::multi_bump(std::vector<Bump> bumps) {
  if (bumps.empty()) throw std::invalid_argument("multi_bump needs bumps");
  const std::size_t dim = bumps[0].center.size();
  double top = 0.0;
  for (const Bump& b : bumps) {
    validate_center(b.center);
    if (b.center.size() != dim)
      throw std::invalid_argument("bump centers must share one dimension");
    if (!(b.width > 0.0)) throw std::invalid_argument("bump width must be > 0");
    if (!(b.height > 0.0 && b.height <= 1.0))
      throw std::invalid_argument("bump height must lie in (0, 1]");
    top = std::max(top, b.height);
  }
  if (top != 1.0)
    throw std::invalid_argument("one bump must have height 1.0");
  SyntheticObjective o;
  o.kind_ = Kind::MultiBump;
  o.dimension_ = dim;
  o.bumps_ = std::move(bumps);
  return o;
}

SyntheticObjective SyntheticObjective::plateau_step(double threshold,
                                                    double low, double high) {
  if (!(threshold >= 0.0 && threshold <= 1.0))
    throw std::invalid_argument("plateau threshold must lie in [0, 1]");
  if (!(low >= 0.0 && low < high && high <= 1.0))
    throw std::invalid_argument("plateau levels need 0 <= low < high <= 1");
  SyntheticObjective o;
  o.kind_ = Kind::PlateauStep;
  o.threshold_ = threshold;
  o.low_ = low;
  o.high_ = high;
  return o;
}

SyntheticObjective SyntheticObjective::noisy_bump(std::vector<double> center,
                                                  double width,
                                                  double noise_sd,
                                                  std::uint64_t seed) {
  SyntheticObjective o = gaussian_bump(std::move(center), width);
  if (!(noise_sd >= 0.0))
    throw std::invalid_argument("noise_sd must be >= 0");
  o.kind_ = Kind::NoisyBump;
  o.noise_sd_ = noise_sd;
  o.seed_ = seed;
  return o;
}

double SyntheticObjective::evaluate(const HyperParamSpace& space,
                                    const HyperParamVector& hp) const {
  const std::vector<double> u = space.normalize(hp);
  if (dimension_ != 0 && u.size() != dimension_)
    throw std::invalid_argument("objective dimension mismatch");

  switch (kind_) {
    case Kind::Constant:
      return value_;
    case Kind::GaussianBump:
      return bump_value(bumps_[0], u);
    case Kind::MultiBump: {
      double best = 0.0;
      for (const Bump& b : bumps_) best = std::max(best, bump_value(b, u));
      return best;
    }
    case Kind::PlateauStep: {
      double mean = 0.0;
      for (double v : u) mean += v;
      mean /= static_cast<double>(u.size());
      return mean >= threshold_ ? high_ : low_;
    }
    case Kind::NoisyBump: {
      const double base = bump_value(bumps_[0], u);
      // noise keyed on (seed, normalized coordinates): pure under reruns
      std::uint64_t h = fnv1a64_u64(seed_, 0xCBF29CE484222325ULL);
      for (double v : u) h = fnv1a64_double(v, h);
      SplitMix64 rng(h);
      const double u1 = rng.next_double();
      const double u2 = rng.next_double();
      const double z = std::sqrt(-2.0 * std::log(1.0 - u1)) *
                       std::cos(2.0 * std::numbers::pi * u2);
      return clamp01(base + noise_sd_ * z);
    }
  }
  return 0.0;
}

std::string SyntheticObjective::name() const {
  switch (kind_) {
    case Kind::Constant: return "constant";
    case Kind::GaussianBump: return "gaussian_bump";
    case Kind::MultiBump: return "multi_bump";
    case Kind::PlateauStep: return "plateau_step";
    case Kind::NoisyBump: return "noisy_bump";
  }
  return "unknown";
}

Objective SyntheticObjective::bind(const HyperParamSpace& space) const {
  Objective o;
  o.name = name();
  o.fn = [obj = *this, space](const HyperParamVector& hp) {
    return obj.evaluate(space, hp);
  };
  return o;
}

HyperParamSpace canonical_space() {
  return HyperParamSpace({{"x0", ParamKind::Continuous, 0.0, 1.0, {}},
                          {"x1", ParamKind::Continuous, 0.0, 1.0, {}}});
}

SyntheticObjective canonical_objective() {
  return SyntheticObjective::gaussian_bump({0.3, 0.7}, 0.08);
}

const char* to_string(BaselineSearcher::Kind kind) {
  return kind == BaselineSearcher::Kind::RandomSearch ? "random_search"
                                                      : "grid_search";
}

BaselineResult run_random_search(const HyperParamSpace& space,
                                 const Objective& obj, std::size_t budget,
                                 std::uint64_t seed) {
  if (budget == 0) throw std::invalid_argument("budget must be >= 1");
  SplitMix64 rng(seed);
  BaselineResult best;
  for (std::size_t i = 0; i < budget; ++i) {
    HyperParamVector hp = space.sample(rng);
    const double q = obj(hp);
    if (i == 0 || q > best.q_best) {  // first maximum wins
      best.q_best = q;
      best.hp_best = std::move(hp);
    }
  }
  best.budget_used = budget;
  return best;
}

BaselineResult run_grid_search(const HyperParamSpace& space,
                               const Objective& obj, std::size_t budget) {
  if (budget == 0) throw std::invalid_argument("budget must be >= 1");
  const std::size_t n = space.size();

  // largest m with m^n <= budget; m = 1 always fits
  std::size_t m = 1;
  for (;;) {
    std::size_t points = 1;
    bool fits = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (points > budget / (m + 1)) {
        fits = false;
        break;
      }
      points *= m + 1;
    }
    if (!fits || points > budget) break;
    ++m;
  }

  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= m;

  BaselineResult best;
  std::vector<std::size_t> idx(n, 0);
  std::vector<double> unit(n, 0.0);
  for (std::size_t point = 0; point < total; ++point) {
    // row-major: axis 0 most significant
    std::size_t rest = point;
    for (std::size_t axis = n; axis-- > 0;) {
      idx[axis] = rest % m;
      rest /= m;
    }
    for (std::size_t axis = 0; axis < n; ++axis)
      unit[axis] = m == 1 ? 0.5
                          : static_cast<double>(idx[axis]) /
                                static_cast<double>(m - 1);
    HyperParamVector hp = space.denormalize(unit);
    const double q = obj(hp);
    if (point == 0 || q > best.q_best) {
      best.q_best = q;
      best.hp_best = std::move(hp);
    }
  }
  best.budget_used = total;
  return best;
}

BaselineResult run_baseline(const BaselineSearcher& searcher,
                            const HyperParamSpace& space,
                            const Objective& obj) {
  if (searcher.kind == BaselineSearcher::Kind::RandomSearch)
    return run_random_search(space, obj, searcher.budget, searcher.seed);
  return run_grid_search(space, obj, searcher.budget);
}

namespace {

struct RunSample {
  double quality = 0.0;
  std::size_t used = 0;
};

ComparisonRow summarize(std::string method, std::size_t allocated,
                        const std::vector<RunSample>& samples) {
  ComparisonRow row;
  row.method = std::move(method);
  row.budget_allocated = allocated;
  row.runs = samples.size();
  double total = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    total += samples[i].quality;
    if (i == 0 || samples[i].quality < row.min_quality)
      row.min_quality = samples[i].quality;
    if (i == 0 || samples[i].quality > row.max_quality)
      row.max_quality = samples[i].quality;
    if (samples[i].used != samples[0].used)
      throw std::logic_error("per-run budget drifted across seeds");
  }
  row.mean_quality = total / static_cast<double>(samples.size());
  row.budget_used = samples[0].used;
  return row;
}

}  // namespace

ComparisonTable compare_tuners(const HyperParamSpace& space,
                               const SyntheticObjective& obj,
                               std::size_t budget,
                               const std::vector<std::uint64_t>& seeds) {
  if (budget < 2)
    throw std::invalid_argument("compare budget must be >= 2");
  if (seeds.empty())
    throw std::invalid_argument("compare needs at least one seed");

  ComparisonTable table;
  table.budget = budget;
  table.seeds = seeds;

  std::vector<RunSample> observer_runs, random_runs, grid_runs;
  observer_runs.reserve(seeds.size());
  random_runs.reserve(seeds.size());
  grid_runs.reserve(seeds.size());

  for (std::uint64_t seed : seeds) {
    // observer: bootstrap takes all but one call, verification the last
    {
      CountingObjective counter(obj.bind(space));
      ExperimentLog log = run_bootstrap(space, counter.as_objective(),
                                        budget - 1, mix(seed, 1));
      MapperObserver observer = fit_observer(log, MapperKind::Knn);
      BasicTunerConfig cfg;
      cfg.seed = mix(seed, 2);
      TuneResult result = basic_adjust(observer, space, cfg);
      const double truth =
          verify_on_objective(result, counter.as_objective(), &log);
      if (counter.count() != budget)
        throw std::logic_error("observer leg budget accounting drifted");
      observer_runs.push_back({truth, evaluation_budget(log)});
    }
    {
      CountingObjective counter(obj.bind(space));
      BaselineResult r = run_random_search(space, counter.as_objective(),
                                           budget, mix(seed, 3));
      if (counter.count() != r.budget_used)
        throw std::logic_error("random leg budget accounting drifted");
      random_runs.push_back({r.q_best, r.budget_used});
    }
    {
      CountingObjective counter(obj.bind(space));
      BaselineResult r =
          run_grid_search(space, counter.as_objective(), budget);
      if (counter.count() != r.budget_used)
        throw std::logic_error("grid leg budget accounting drifted");
      grid_runs.push_back({r.q_best, r.budget_used});
    }
  }

  table.rows.push_back(summarize("observer", budget, observer_runs));
  table.rows.push_back(summarize("random_search", budget, random_runs));
  table.rows.push_back(summarize("grid_search", budget, grid_runs));
  return table;
}

std::string format_comparison(const ComparisonTable& table) {
  char line[160];
  std::string out;
  std::snprintf(line, sizeof line, "budget %zu, %zu seeds\n", table.budget,
                table.seeds.size());
  out += line;
  std::snprintf(line, sizeof line, "%-14s %8s %8s %8s %6s\n", "method",
                "mean", "min", "max", "used");
  out += line;
  for (const ComparisonRow& row : table.rows) {
    std::snprintf(line, sizeof line, "%-14s %8.4f %8.4f %8.4f %6zu\n",
                  row.method.c_str(), row.mean_quality, row.min_quality,
                  row.max_quality, row.budget_used);
    out += line;
  }
  return out;
}

}  // namespace obtune
