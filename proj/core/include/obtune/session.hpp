#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "obtune/multipass.hpp"
#include "obtune/observer.hpp"
#include "obtune/synthetic.hpp"

namespace obtune {

enum class SessionMode { SinglePass, MultiPass };

const char* to_string(SessionMode mode);

// One fully validated session declaration. Every knob a run touches lives
// here; everything random derives from `seed` unless a section pins its own.
struct SessionConfig {
  int schema_version = 1;
  std::uint64_t seed = 0;
  std::vector<ParamSpec> params;
  SyntheticObjective objective = SyntheticObjective::constant(0.5);

  std::size_t bootstrap_count = 0;  // 0 = default 50 * dimension
  std::optional<std::uint64_t> bootstrap_seed;  // default mix(seed, 1)
  bool bootstrap_parallel = true;

  MapperKind mapper_kind = MapperKind::Knn;
  std::size_t mapper_k = 5;

  SessionMode mode = SessionMode::SinglePass;
  StrategyKind strategy = StrategyKind::Basic;

  double q_ex = 1.0;
  std::size_t max_iterations = 200;
  std::size_t max_idle = 20;
  double min_contribution = 0.001;

  double q_target = 1.0;
  double q_init = 0.6;
  QStepStrategy step;
  std::size_t max_stagnation = 3;
  bool warm_start = true;

  std::size_t compare_budget = 512;
  std::vector<std::uint64_t> compare_seeds;

  std::string out_dir = ".";
  std::uint64_t config_digest = 0;  // hash of the raw config bytes

  std::size_t effective_bootstrap_count() const {
    return bootstrap_count != 0 ? bootstrap_count : 50 * params.size();
  }
  std::uint64_t effective_bootstrap_seed() const;
  std::uint64_t tuner_seed() const;
  HyperParamSpace space() const { return HyperParamSpace(params); }
  SelectionStrategy selection_strategy() const;
};

// Parses the JSON document; collects every violation (including unknown
// keys, at any depth) into one ConfigError instead of stopping at the first.
SessionConfig parse_session_config(const std::string& text);

// read_text_file + parse + digest of the raw bytes
SessionConfig load_session_config(const std::string& path);

// CLI-level overrides applied after parsing.
struct SessionOverrides {
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
};

// Everything a session produced, with artifacts pre-serialized so callers
// can persist or diff them without touching the filesystem.
struct SessionOutcome {
  std::optional<TuneResult> single;
  std::optional<MultiPassResult> multi;
  double q_best = 0.0;
  HyperParamVector hp_best;
  double verified_quality = 0.0;
  std::size_t budget = 0;
  std::string experiments_text;
  std::string trajectory_text;
  std::string report_text;  // JSON; `timings` is the only nondeterministic key
};

// bootstrap -> fit -> tune -> verify -> serialize. Pure orchestration: no
// filesystem writes, no exit codes. Throws ConfigError, ObjectiveError,
// InsufficientDataError, SpaceMismatchError.
SessionOutcome execute_session(const SessionConfig& config);

// Exit codes shared by the CLI wrappers below.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUnexpected = 1;
inline constexpr int kExitConfigInvalid = 2;
inline constexpr int kExitObjectiveFailure = 3;
inline constexpr int kExitInsufficientData = 4;

// The CLI subcommands, as testable functions: load config, run, persist
// artifacts under out_dir, print a summary. Each maps exceptions to the
// exit codes above and writes diagnostics to `err`.
int run_session(const std::string& config_path, const SessionOverrides& ov,
                bool quiet, std::ostream& out, std::ostream& err);

int run_compare(const std::string& config_path, const SessionOverrides& ov,
                bool quiet, std::ostream& out, std::ostream& err);

// Full diagnostics list or "valid"; never evaluates the objective.
int validate_config(const std::string& config_path, std::ostream& out,
                    std::ostream& err);

// Pretty-prints a trajectory log and replays its bookkeeping; exit 1 when
// the replay contradicts the file.
int inspect_trajectory(const std::string& trajectory_path, bool quiet,
                       std::ostream& out, std::ostream& err);

}  // namespace obtune
