#include "obtune/session.hpp"

#include <chrono>
#include <filesystem>
#include <initializer_list>
#include <ostream>
#include <set>
#include <string>

#include <json.hpp>

#include "obtune/errors.hpp"
#include "obtune/hash.hpp"
#include "obtune/logs.hpp"
#include "obtune/random.hpp"

namespace obtune {

using nlohmann::json;

const char* to_string(SessionMode mode) {
  return mode == SessionMode::SinglePass ? "single_pass" : "multi_pass";
}

std::uint64_t SessionConfig::effective_bootstrap_seed() const {
  return bootstrap_seed ? *bootstrap_seed : mix(seed, 1);
}

std::uint64_t SessionConfig::tuner_seed() const { return mix(seed, 2); }

SelectionStrategy SessionConfig::selection_strategy() const {
  if (strategy == StrategyKind::Basic) return SelectionStrategy::basic();
  std::vector<CostFunction> costs;
  costs.reserve(params.size());
  for (const ParamSpec& p : params) {
    if (!p.cost)
      throw std::invalid_argument("cost_based strategy needs a cost per "
                                  "parameter; '" + p.name + "' has none");
    costs.push_back(*p.cost);
  }
  return SelectionStrategy::cost_based(std::move(costs));
}

namespace {

struct Diags {
  std::vector<ConfigError::Diagnostic> items;

  void add(std::string path, std::string message) {
    items.push_back({std::move(path), std::move(message)});
  }
  void done() {
    if (!items.empty()) throw ConfigError(std::move(items));
  }
};

// "$" marks the document root; keys under it read better without a prefix
std::string join(const std::string& path, const std::string& key) {
  return path == "$" ? key : path + "." + key;
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed, Diags& diags) {
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items())
    if (!ok.count(key)) diags.add(join(path, key), "unknown key");
}

const json* get_object(const json& obj, const std::string& path,
                       const char* key, Diags& diags) {
  if (!obj.contains(key)) return nullptr;
  if (!obj[key].is_object()) {
    diags.add(join(path, key), "must be an object");
    return nullptr;
  }
  return &obj[key];
}

const json* get_array(const json& obj, const std::string& path,
                      const char* key, Diags& diags) {
  if (!obj.contains(key)) return nullptr;
  if (!obj[key].is_array()) {
    diags.add(join(path, key), "must be an array");
    return nullptr;
  }
  return &obj[key];
}

std::optional<double> get_number(const json& obj, const std::string& path,
                                 const char* key, Diags& diags) {
  if (!obj.contains(key)) return std::nullopt;
  if (!obj[key].is_number()) {
    diags.add(join(path, key), "must be a number");
    return std::nullopt;
  }
  return obj[key].get<double>();
}

std::optional<std::uint64_t> get_unsigned(const json& obj,
                                          const std::string& path,
                                          const char* key, Diags& diags) {
  if (!obj.contains(key)) return std::nullopt;
  const json& v = obj[key];
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  diags.add(join(path, key), "must be a non-negative integer");
  return std::nullopt;
}

std::optional<bool> get_bool(const json& obj, const std::string& path,
                             const char* key, Diags& diags) {
  if (!obj.contains(key)) return std::nullopt;
  if (!obj[key].is_boolean()) {
    diags.add(join(path, key), "must be true or false");
    return std::nullopt;
  }
  return obj[key].get<bool>();
}

std::optional<std::string> get_string(const json& obj, const std::string& path,
                                      const char* key, Diags& diags) {
  if (!obj.contains(key)) return std::nullopt;
  if (!obj[key].is_string()) {
    diags.add(join(path, key), "must be a string");
    return std::nullopt;
  }
  return obj[key].get<std::string>();
}

std::optional<std::vector<double>> get_number_array(const json& obj,
                                                    const std::string& path,
                                                    const char* key,
                                                    Diags& diags) {
  const json* arr = get_array(obj, path, key, diags);
  if (!arr) return std::nullopt;
  std::vector<double> out;
  out.reserve(arr->size());
  for (std::size_t i = 0; i < arr->size(); ++i) {
    if (!(*arr)[i].is_number()) {
      diags.add(join(path, key) + "[" + std::to_string(i) + "]",
                "must be a number");
      return std::nullopt;
    }
    out.push_back((*arr)[i].get<double>());
  }
  return out;
}

std::optional<CostFunction> parse_cost(const json& node,
                                       const std::string& path,
                                       double lower, double upper,
                                       Diags& diags) {
  if (!node.is_object()) {
    diags.add(path, "must be an object");
    return std::nullopt;
  }
  const auto kind = get_string(node, path, "kind", diags);
  if (!kind) {
    diags.add(path + ".kind", "required");
    return std::nullopt;
  }
  try {
    if (*kind == "zero") {
      check_keys(node, path, {"kind"}, diags);
      return CostFunction::zero();
    }
    if (*kind == "linear") {
      check_keys(node, path, {"kind"}, diags);
      return CostFunction::linear_normalized(lower, upper);
    }
    if (*kind == "table") {
      check_keys(node, path, {"kind", "points"}, diags);
      const json* points = get_array(node, path, "points", diags);
      if (!points) {
        diags.add(path + ".points", "required");
        return std::nullopt;
      }
      std::vector<std::pair<double, double>> rows;
      for (std::size_t i = 0; i < points->size(); ++i) {
        const json& row = (*points)[i];
        const std::string row_path =
            path + ".points[" + std::to_string(i) + "]";
        if (!row.is_array() || row.size() != 2 || !row[0].is_number() ||
            !row[1].is_number()) {
          diags.add(row_path, "must be a [value, cost] pair");
          return std::nullopt;
        }
        rows.emplace_back(row[0].get<double>(), row[1].get<double>());
      }
      return CostFunction::table(std::move(rows));
    }
  } catch (const std::exception& e) {
    diags.add(path, e.what());
    return std::nullopt;
  }
  diags.add(path + ".kind", "unknown cost kind '" + *kind + "'");
  return std::nullopt;
}

std::vector<ParamSpec> parse_space(const json& root, Diags& diags) {
  std::vector<ParamSpec> params;
  const json* arr = get_array(root, "$", "space", diags);
  if (!arr) {
    if (!root.contains("space")) diags.add("space", "required");
    return params;
  }
  if (arr->empty()) {
    diags.add("space", "needs at least one parameter");
    return params;
  }
  for (std::size_t i = 0; i < arr->size(); ++i) {
    const json& node = (*arr)[i];
    const std::string path = "space[" + std::to_string(i) + "]";
    if (!node.is_object()) {
      diags.add(path, "must be an object");
      continue;
    }
    check_keys(node, path, {"name", "kind", "lower", "upper", "cost"}, diags);
    ParamSpec spec;
    if (auto name = get_string(node, path, "name", diags)) spec.name = *name;
    else diags.add(path + ".name", "required");
    if (auto kind = get_string(node, path, "kind", diags)) {
      if (*kind == "continuous") spec.kind = ParamKind::Continuous;
      else if (*kind == "integer") spec.kind = ParamKind::Integer;
      else diags.add(path + ".kind", "must be continuous or integer");
    }
    if (auto v = get_number(node, path, "lower", diags)) spec.lower = *v;
    else if (!node.contains("lower")) diags.add(path + ".lower", "required");
    if (auto v = get_number(node, path, "upper", diags)) spec.upper = *v;
    else if (!node.contains("upper")) diags.add(path + ".upper", "required");
    if (node.contains("cost"))
      spec.cost = parse_cost(node["cost"], path + ".cost", spec.lower,
                             spec.upper, diags);
    params.push_back(std::move(spec));
  }
  // surface construction-time violations (bounds, duplicates) as diagnostics
  if (diags.items.empty()) {
    try {
      HyperParamSpace probe(params);
    } catch (const std::exception& e) {
      diags.add("space", e.what());
    }
  }
  return params;
}

SyntheticObjective parse_objective(const json& root, std::size_t dimension,
                                   Diags& diags) {
  SyntheticObjective fallback = SyntheticObjective::constant(0.5);
  const json* node = get_object(root, "$", "objective", diags);
  if (!node) {
    if (!root.contains("objective")) diags.add("objective", "required");
    return fallback;
  }
  const std::string path = "objective";
  const auto kind = get_string(*node, path, "kind", diags);
  if (!kind) {
    diags.add(path + ".kind", "required");
    return fallback;
  }

  auto center_of = [&](const char* key) -> std::vector<double> {
    auto center = get_number_array(*node, path, key, diags);
    if (!center) {
      if (!node->contains(key)) diags.add(join(path, key), "required");
      return {};
    }
    if (dimension != 0 && center->size() != dimension)
      diags.add(join(path, key),
                "length must equal the space dimension (" +
                    std::to_string(dimension) + ")");
    return *center;
  };

  try {
    if (*kind == "constant") {
      check_keys(*node, path, {"kind", "value"}, diags);
      const auto value = get_number(*node, path, "value", diags);
      if (!value) {
        diags.add(path + ".value", "required");
        return fallback;
      }
      return SyntheticObjective::constant(*value);
    }
    if (*kind == "gaussian_bump" || *kind == "noisy_bump") {
      const bool noisy = *kind == "noisy_bump";
      if (noisy)
        check_keys(*node, path,
                   {"kind", "center", "width", "noise_sd", "noise_seed"},
                   diags);
      else
        check_keys(*node, path, {"kind", "center", "width"}, diags);
      std::vector<double> center = center_of("center");
      const auto width = get_number(*node, path, "width", diags);
      if (center.empty() || !width) {
        if (!node->contains("width")) diags.add(path + ".width", "required");
        return fallback;
      }
      if (!noisy) return SyntheticObjective::gaussian_bump(center, *width);
      const auto sd = get_number(*node, path, "noise_sd", diags);
      const auto noise_seed = get_unsigned(*node, path, "noise_seed", diags);
      if (!sd) {
        diags.add(path + ".noise_sd", "required");
        return fallback;
      }
      return SyntheticObjective::noisy_bump(center, *width, *sd,
                                            noise_seed.value_or(0));
    }
    if (*kind == "multi_bump") {
      check_keys(*node, path, {"kind", "bumps"}, diags);
      const json* arr = get_array(*node, path, "bumps", diags);
      if (!arr) {
        diags.add(path + ".bumps", "required");
        return fallback;
      }
      std::vector<Bump> bumps;
      for (std::size_t i = 0; i < arr->size(); ++i) {
        const json& b = (*arr)[i];
        const std::string bpath = path + ".bumps[" + std::to_string(i) + "]";
        if (!b.is_object()) {
          diags.add(bpath, "must be an object");
          return fallback;
        }
        check_keys(b, bpath, {"center", "width", "height"}, diags);
        Bump bump;
        if (auto c = get_number_array(b, bpath, "center", diags)) {
          bump.center = *c;
          if (dimension != 0 && bump.center.size() != dimension)
            diags.add(bpath + ".center",
                      "length must equal the space dimension");
        } else {
          diags.add(bpath + ".center", "required");
          return fallback;
        }
        if (auto w = get_number(b, bpath, "width", diags)) bump.width = *w;
        if (auto h = get_number(b, bpath, "height", diags)) bump.height = *h;
        bumps.push_back(std::move(bump));
      }
      return SyntheticObjective::multi_bump(std::move(bumps));
    }
    if (*kind == "plateau_step") {
      check_keys(*node, path, {"kind", "threshold", "low", "high"}, diags);
      const auto threshold = get_number(*node, path, "threshold", diags);
      const auto low = get_number(*node, path, "low", diags);
      const auto high = get_number(*node, path, "high", diags);
      if (!threshold || !low || !high) {
        for (const char* key : {"threshold", "low", "high"})
          if (!node->contains(key)) diags.add(join(path, key), "required");
        return fallback;
      }
      return SyntheticObjective::plateau_step(*threshold, *low, *high);
    }
  } catch (const std::exception& e) {
    diags.add(path, e.what());
    return fallback;
  }
  diags.add(path + ".kind", "unknown objective kind '" + *kind + "'");
  return fallback;
}

QStepStrategy parse_step(const json& node, const std::string& path,
                         Diags& diags) {
  QStepStrategy fallback;
  if (!node.is_object()) {
    diags.add(path, "must be an object");
    return fallback;
  }
  const auto kind = get_string(node, path, "kind", diags);
  if (!kind) {
    diags.add(path + ".kind", "required");
    return fallback;
  }
  try {
    if (*kind == "constant") {
      check_keys(node, path, {"kind", "value"}, diags);
      const auto value = get_number(node, path, "value", diags);
      if (!value) {
        diags.add(path + ".value", "required");
        return fallback;
      }
      return QStepStrategy::constant(*value);
    }
    if (*kind == "decaying") {
      check_keys(node, path, {"kind", "initial", "factor"}, diags);
      const auto initial = get_number(node, path, "initial", diags);
      const auto factor = get_number(node, path, "factor", diags);
      if (!initial || !factor) {
        if (!node.contains("initial")) diags.add(path + ".initial", "required");
        if (!node.contains("factor")) diags.add(path + ".factor", "required");
        return fallback;
      }
      return QStepStrategy::decaying(*initial, *factor);
    }
  } catch (const std::exception& e) {
    diags.add(path, e.what());
    return fallback;
  }
  diags.add(path + ".kind", "unknown step kind '" + *kind + "'");
  return fallback;
}

void require_range(std::optional<double> v, const char* path, double lo,
                   double hi, Diags& diags) {
  if (v && !(*v >= lo && *v <= hi))
    diags.add(path, "must lie in [" + fmt_double(lo) + ", " + fmt_double(hi) +
                        "]");
}

}  // namespace

SessionConfig parse_session_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("$", e.what());
  }
  if (!root.is_object()) throw ConfigError("$", "must be a JSON object");

  Diags diags;
  SessionConfig cfg;

  check_keys(root, "$",
             {"schema_version", "seed", "space", "objective", "bootstrap",
              "mapper", "mode", "tuner", "multipass", "strategy", "compare",
              "out_dir"},
             diags);

  if (auto v = get_unsigned(root, "$", "schema_version", diags)) {
    if (*v != 1) diags.add("schema_version", "unsupported version");
  } else if (!root.contains("schema_version")) {
    diags.add("schema_version", "required");
  }

  if (auto v = get_unsigned(root, "$", "seed", diags)) cfg.seed = *v;

  cfg.params = parse_space(root, diags);
  const std::size_t dimension = cfg.params.size();

  cfg.objective = parse_objective(root, dimension, diags);

  if (const json* node = get_object(root, "$", "bootstrap", diags)) {
    check_keys(*node, "bootstrap", {"count", "seed", "parallel"}, diags);
    if (auto v = get_unsigned(*node, "bootstrap", "count", diags)) {
      if (*v == 0) diags.add("bootstrap.count", "must be >= 1");
      else cfg.bootstrap_count = *v;
    }
    if (auto v = get_unsigned(*node, "bootstrap", "seed", diags))
      cfg.bootstrap_seed = *v;
    if (auto v = get_bool(*node, "bootstrap", "parallel", diags))
      cfg.bootstrap_parallel = *v;
  }

  if (const json* node = get_object(root, "$", "mapper", diags)) {
    check_keys(*node, "mapper", {"kind", "k"}, diags);
    if (auto kind = get_string(*node, "mapper", "kind", diags)) {
      if (*kind == "knn") cfg.mapper_kind = MapperKind::Knn;
      else if (*kind == "linear") cfg.mapper_kind = MapperKind::Linear;
      else diags.add("mapper.kind", "must be knn or linear");
    }
    if (auto v = get_unsigned(*node, "mapper", "k", diags)) {
      if (*v == 0) diags.add("mapper.k", "must be >= 1");
      else cfg.mapper_k = *v;
    }
  }

  if (auto mode = get_string(root, "$", "mode", diags)) {
    if (*mode == "single_pass") cfg.mode = SessionMode::SinglePass;
    else if (*mode == "multi_pass") cfg.mode = SessionMode::MultiPass;
    else diags.add("mode", "must be single_pass or multi_pass");
  }

  if (auto strategy = get_string(root, "$", "strategy", diags)) {
    if (*strategy == "basic") cfg.strategy = StrategyKind::Basic;
    else if (*strategy == "cost_based") cfg.strategy = StrategyKind::CostBased;
    else diags.add("strategy", "must be basic or cost_based");
  }
  if (cfg.strategy == StrategyKind::CostBased) {
    for (std::size_t i = 0; i < cfg.params.size(); ++i)
      if (!cfg.params[i].cost)
        diags.add("space[" + std::to_string(i) + "].cost",
                  "required by strategy=cost_based");
  }

  if (const json* node = get_object(root, "$", "tuner", diags)) {
    check_keys(*node, "tuner",
               {"q_ex", "max_iterations", "max_idle", "min_contribution"},
               diags);
    if (auto v = get_number(*node, "tuner", "q_ex", diags)) {
      cfg.q_ex = *v;
      require_range(v, "tuner.q_ex", 0.0, 1.0, diags);
    }
    if (auto v = get_unsigned(*node, "tuner", "max_iterations", diags)) {
      if (*v == 0) diags.add("tuner.max_iterations", "must be >= 1");
      else cfg.max_iterations = *v;
    }
    if (auto v = get_unsigned(*node, "tuner", "max_idle", diags)) {
      if (*v == 0) diags.add("tuner.max_idle", "must be >= 1");
      else cfg.max_idle = *v;
    }
    if (auto v = get_number(*node, "tuner", "min_contribution", diags)) {
      cfg.min_contribution = *v;
      require_range(v, "tuner.min_contribution", 0.0, 1.0, diags);
    }
  }

  if (cfg.mode == SessionMode::MultiPass) {
    const json* node = get_object(root, "$", "multipass", diags);
    if (!node) {
      if (!root.contains("multipass"))
        diags.add("multipass", "required when mode=multi_pass");
    } else {
      check_keys(*node, "multipass",
                 {"q_target", "q_init", "step", "max_stagnation",
                  "warm_start"},
                 diags);
      if (auto v = get_number(*node, "multipass", "q_target", diags)) {
        cfg.q_target = *v;
        require_range(v, "multipass.q_target", 0.0, 1.0, diags);
      } else if (!node->contains("q_target")) {
        diags.add("multipass.q_target", "required");
      }
      if (auto v = get_number(*node, "multipass", "q_init", diags)) {
        cfg.q_init = *v;
        require_range(v, "multipass.q_init", 0.0, 1.0, diags);
      }
      if (cfg.q_init > cfg.q_target)
        diags.add("multipass.q_init", "must not exceed q_target");
      if (node->contains("step"))
        cfg.step = parse_step((*node)["step"], "multipass.step", diags);
      if (auto v = get_unsigned(*node, "multipass", "max_stagnation", diags)) {
        if (*v == 0) diags.add("multipass.max_stagnation", "must be >= 1");
        else cfg.max_stagnation = *v;
      }
      if (auto v = get_bool(*node, "multipass", "warm_start", diags))
        cfg.warm_start = *v;
      if (cfg.step.kind == QStepStrategy::Kind::Decaying &&
          cfg.q_init + cfg.step.initial / (1.0 - cfg.step.factor) <
              cfg.q_target)
        diags.add("multipass.step",
                  "decaying steps sum short of q_target; the passes could "
                  "never finish");
    }
  }

  if (const json* node = get_object(root, "$", "compare", diags)) {
    check_keys(*node, "compare", {"budget", "seeds"}, diags);
    if (auto v = get_unsigned(*node, "compare", "budget", diags)) {
      if (*v < 2) diags.add("compare.budget", "must be >= 2");
      else cfg.compare_budget = *v;
    }
    if (node->contains("seeds")) {
      const json* seeds = get_array(*node, "compare", "seeds", diags);
      if (seeds) {
        if (seeds->empty()) diags.add("compare.seeds", "must be nonempty");
        for (std::size_t i = 0; i < seeds->size(); ++i) {
          const json& s = (*seeds)[i];
          if (s.is_number_unsigned())
            cfg.compare_seeds.push_back(s.get<std::uint64_t>());
          else if (s.is_number_integer() && s.get<std::int64_t>() >= 0)
            cfg.compare_seeds.push_back(
                static_cast<std::uint64_t>(s.get<std::int64_t>()));
          else
            diags.add("compare.seeds[" + std::to_string(i) + "]",
                      "must be a non-negative integer");
        }
      }
    }
  }
  if (cfg.compare_seeds.empty())
    for (std::uint64_t s = 1; s <= 20; ++s) cfg.compare_seeds.push_back(s);

  if (auto v = get_string(root, "$", "out_dir", diags)) cfg.out_dir = *v;

  diags.done();
  return cfg;
}

SessionConfig load_session_config(const std::string& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const std::exception& e) {
    throw ConfigError("$", e.what());
  }
  SessionConfig cfg = parse_session_config(text);
  cfg.config_digest = fnv1a64(text);
  return cfg;
}

namespace {

json hp_to_json(const HyperParamVector& hp) {
  json arr = json::array();
  for (double v : hp.values) arr.push_back(v);
  return arr;
}

json single_result_json(const TuneResult& result) {
  json out;
  out["q_best"] = result.q_best;
  out["hp_best"] = hp_to_json(result.hp_best);
  out["initial_q"] = result.initial_q;
  out["iterations"] = result.iterations;
  out["idle"] = result.idle;
  out["termination"] = to_string(result.termination);
  return out;
}

json multi_result_json(const MultiPassResult& result) {
  json out;
  out["q_best"] = result.q_best;
  out["hp_best"] = hp_to_json(result.hp_best);
  out["termination"] = to_string(result.termination);
  out["stagnation"] = result.stagnation;
  json passes = json::array();
  for (const PassOutcome& pass : result.passes) {
    json p;
    p["pass"] = pass.pass_index;
    p["q_ex"] = pass.q_ex;
    p["q_best"] = pass.result.q_best;
    p["iterations"] = pass.result.iterations;
    p["termination"] = to_string(pass.result.termination);
    p["stagnation_after"] = pass.stagnation_after;
    passes.push_back(std::move(p));
  }
  out["passes"] = std::move(passes);
  return out;
}

double elapsed_ms(std::chrono::steady_clock::time_point from,
                  std::chrono::steady_clock::time_point to) {
  return std::chrono::duration<double, std::milli>(to - from).count();
}

}  // namespace

SessionOutcome execute_session(const SessionConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  const HyperParamSpace space = config.space();
  const CountingObjective counter(config.objective.bind(space));

  ExperimentLog log =
      run_bootstrap(space, counter.as_objective(),
                    config.effective_bootstrap_count(),
                    config.effective_bootstrap_seed(),
                    config.bootstrap_parallel);
  const auto t1 = std::chrono::steady_clock::now();

  const MapperObserver observer =
      fit_observer(log, config.mapper_kind, {config.mapper_k});
  const auto t2 = std::chrono::steady_clock::now();

  SessionOutcome outcome;
  std::string trajectory;
  if (config.mode == SessionMode::SinglePass) {
    BasicTunerConfig tuner;
    tuner.q_ex = config.q_ex;
    tuner.max_iterations = config.max_iterations;
    tuner.max_idle = config.max_idle;
    tuner.min_contribution = config.min_contribution;
    tuner.strategy = config.selection_strategy();
    tuner.seed = config.tuner_seed();
    TuneResult result = basic_adjust(observer, space, tuner);
    trajectory = format_trajectory(
        {1, space.digest(), result.initial_q, tuner.min_contribution,
         tuner.strategy.kind},
        result.trajectory);
    outcome.q_best = result.q_best;
    outcome.hp_best = result.hp_best;
    outcome.single = std::move(result);
  } else {
    MultiPassConfig mp;
    mp.q_target = config.q_target;
    mp.q_init = config.q_init;
    mp.step = config.step;
    mp.max_stagnation = config.max_stagnation;
    mp.warm_start = config.warm_start;
    mp.inner.max_iterations = config.max_iterations;
    mp.inner.max_idle = config.max_idle;
    mp.inner.min_contribution = config.min_contribution;
    mp.inner.strategy = config.selection_strategy();
    mp.inner.seed = config.tuner_seed();
    MultiPassResult result = multi_pass_adjust(observer, space, mp);
    for (const PassOutcome& pass : result.passes)
      trajectory += format_trajectory(
          {1, space.digest(), pass.result.initial_q,
           mp.inner.min_contribution, mp.inner.strategy.kind},
          pass.result.trajectory);
    outcome.q_best = result.q_best;
    outcome.hp_best = result.hp_best;
    outcome.multi = std::move(result);
  }
  const auto t3 = std::chrono::steady_clock::now();

  TuneResult best;
  best.q_best = outcome.q_best;
  best.hp_best = outcome.hp_best;
  outcome.verified_quality =
      verify_on_objective(best, counter.as_objective(), &log);
  outcome.budget = evaluation_budget(log);
  if (outcome.budget != counter.count())
    throw std::logic_error("session budget accounting drifted");

  outcome.experiments_text = format_experiment_log(log);
  outcome.trajectory_text = std::move(trajectory);

  json report;
  report["schema_version"] = 1;
  report["config_digest"] = to_hex(config.config_digest);
  report["seed"] = config.seed;
  report["space"] = {{"digest", to_hex(space.digest())},
                     {"dimension", space.size()}};
  report["objective"] = {{"name", config.objective.name()}};
  report["bootstrap"] = {{"count", log.size()},
                         {"seed", log.seed()},
                         {"log_digest", to_hex(log.digest())}};
  report["mapper"] = {{"kind", to_string(config.mapper_kind)},
                      {"k", config.mapper_k}};
  report["mode"] = to_string(config.mode);
  report["strategy"] = to_string(config.strategy);
  report["result"] = outcome.single ? single_result_json(*outcome.single)
                                    : multi_result_json(*outcome.multi);
  report["verified_quality"] = outcome.verified_quality;
  report["budget"] = {{"bootstrap", log.size()},
                      {"verification", log.verification_evals()},
                      {"total", outcome.budget}};
  report["artifacts"] = {{"experiments", "experiments.log"},
                         {"trajectory", "trajectory.log"}};
  const auto t4 = std::chrono::steady_clock::now();
  report["timings"] = {{"bootstrap_ms", elapsed_ms(t0, t1)},
                       {"fit_ms", elapsed_ms(t1, t2)},
                       {"tune_ms", elapsed_ms(t2, t3)},
                       {"total_ms", elapsed_ms(t0, t4)}};
  outcome.report_text = report.dump(2) + "\n";
  return outcome;
}

namespace {

int describe_failure(const std::exception& e, std::ostream& err) {
  err << e.what() << "\n";
  return kExitUnexpected;
}

SessionConfig load_with_overrides(const std::string& path,
                                  const SessionOverrides& ov) {
  SessionConfig cfg = load_session_config(path);
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.out_dir) cfg.out_dir = *ov.out_dir;
  return cfg;
}

}  // namespace

int run_session(const std::string& config_path, const SessionOverrides& ov,
                bool quiet, std::ostream& out, std::ostream& err) {
  try {
    const SessionConfig cfg = load_with_overrides(config_path, ov);
    const SessionOutcome outcome = execute_session(cfg);

    std::filesystem::create_directories(cfg.out_dir);
    const auto at = [&cfg](const char* name) {
      return (std::filesystem::path(cfg.out_dir) / name).string();
    };
    write_text_file(at("experiments.log"), outcome.experiments_text);
    write_text_file(at("trajectory.log"), outcome.trajectory_text);
    write_text_file(at("report.json"), outcome.report_text);

    // every persisted trajectory must replay cleanly; anything else is a
    // bug in the loop or the serializer
    for (const TrajectorySection& section :
         parse_trajectory(outcome.trajectory_text)) {
      const TrajectoryCheck check = check_trajectory(section);
      if (!check.ok)
        throw std::logic_error("trajectory failed its replay: " +
                               check.detail);
    }

    if (!quiet) {
      out << "q_best " << fmt_double(outcome.q_best) << "\n";
      out << "verified_quality " << fmt_double(outcome.verified_quality)
          << "\n";
      if (outcome.single)
        out << "termination " << to_string(outcome.single->termination)
            << "\n"
            << "iterations " << outcome.single->iterations << "\n";
      else
        out << "termination " << to_string(outcome.multi->termination) << "\n"
            << "passes " << outcome.multi->passes.size() << "\n";
      out << "budget " << outcome.budget << "\n";
      out << "artifacts " << cfg.out_dir << "/{experiments.log,trajectory.log"
          << ",report.json}\n";
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << e.what() << "\n";
    return kExitConfigInvalid;
  } catch (const InsufficientDataError& e) {
    err << e.what() << "\n";
    return kExitInsufficientData;
  } catch (const ObjectiveError& e) {
    err << e.what() << "\n";
    return kExitObjectiveFailure;
  } catch (const std::exception& e) {
    return describe_failure(e, err);
  }
}

int run_compare(const std::string& config_path, const SessionOverrides& ov,
                bool quiet, std::ostream& out, std::ostream& err) {
  try {
    const SessionConfig cfg = load_with_overrides(config_path, ov);
    const HyperParamSpace space = cfg.space();
    const ComparisonTable table = compare_tuners(
        space, cfg.objective, cfg.compare_budget, cfg.compare_seeds);
    const std::string text = format_comparison(table);

    json doc;
    doc["budget"] = table.budget;
    doc["seeds"] = table.seeds;
    json rows = json::array();
    for (const ComparisonRow& row : table.rows) {
      json r;
      r["method"] = row.method;
      r["mean_quality"] = row.mean_quality;
      r["min_quality"] = row.min_quality;
      r["max_quality"] = row.max_quality;
      r["budget_allocated"] = row.budget_allocated;
      r["budget_used"] = row.budget_used;
      r["runs"] = row.runs;
      rows.push_back(std::move(r));
    }
    doc["rows"] = std::move(rows);

    std::filesystem::create_directories(cfg.out_dir);
    const auto at = [&cfg](const char* name) {
      return (std::filesystem::path(cfg.out_dir) / name).string();
    };
    write_text_file(at("comparison.txt"), text);
    write_text_file(at("comparison.json"), doc.dump(2) + "\n");

    if (!quiet) out << text;
    return kExitOk;
  } catch (const ConfigError& e) {
    err << e.what() << "\n";
    return kExitConfigInvalid;
  } catch (const InsufficientDataError& e) {
    err << e.what() << "\n";
    return kExitInsufficientData;
  } catch (const ObjectiveError& e) {
    err << e.what() << "\n";
    return kExitObjectiveFailure;
  } catch (const std::exception& e) {
    return describe_failure(e, err);
  }
}

int validate_config(const std::string& config_path, std::ostream& out,
                    std::ostream& err) {
  try {
    load_session_config(config_path);
    out << "valid\n";
    return kExitOk;
  } catch (const ConfigError& e) {
    for (const ConfigError::Diagnostic& d : e.diagnostics())
      err << d.path << ": " << d.message << "\n";
    return kExitConfigInvalid;
  } catch (const std::exception& e) {
    return describe_failure(e, err);
  }
}

int inspect_trajectory(const std::string& trajectory_path, bool quiet,
                       std::ostream& out, std::ostream& err) {
  std::vector<TrajectorySection> sections;
  try {
    sections = parse_trajectory(read_text_file(trajectory_path));
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return kExitConfigInvalid;
  }

  bool consistent = true;
  for (std::size_t s = 0; s < sections.size(); ++s) {
    const TrajectorySection& section = sections[s];
    const TrajectoryCheck check = check_trajectory(section);
    if (!quiet) {
      out << "section " << s << ": strategy "
          << to_string(section.header.strategy) << ", q_initial "
          << fmt_double(section.header.q_initial) << ", "
          << section.entries.size() << " iterations\n";
      for (const IterationTrace& t : section.entries)
        out << "  " << t.iteration << ": chose " << t.chosen << " "
            << (t.accepted ? "accepted" : "idle") << " q_best "
            << fmt_double(t.q_best_after) << "\n";
      out << "  replay: q_best " << fmt_double(check.q_best) << ", "
          << check.accepted << " accepted, idle " << check.idle << "\n";
    }
    if (!check.ok) {
      err << "section " << s << " inconsistent: " << check.detail << "\n";
      consistent = false;
    }
  }
  return consistent ? kExitOk : kExitUnexpected;
}

}  // namespace obtune
