#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "obtune/experiments.hpp"
#include "obtune/observer.hpp"

namespace obtune {

// Shortest-exact decimal for doubles: %.17g round-trips every finite value,
// so formatted logs are bit-faithful to the values that produced them.
std::string fmt_double(double v);

// Strict double parse: the whole token must be consumed.
double parse_double_strict(const std::string& token);

// Experiment log text format, one record per line:
//   #obtune experiments schema=1 seed=<u64> space=<16 hex>
//   <index> <comma-joined native values> <quality>
std::string format_experiment_log(const ExperimentLog& log);

// Parses and revalidates against `space`; throws std::runtime_error with a
// line number on malformed input, SpaceMismatchError on a foreign digest.
ExperimentLog parse_experiment_log(const std::string& text,
                                   const HyperParamSpace& space);

struct TrajectoryHeader {
  int schema = 1;
  std::uint64_t space_digest = 0;
  double q_initial = 0.0;
  double min_contribution = 0.0;
  StrategyKind strategy = StrategyKind::Basic;
};

struct TrajectorySection {
  TrajectoryHeader header;
  std::vector<IterationTrace> entries;
};

// Trajectory text format, one iteration per line:
//   #obtune trajectory schema=1 space=<16 hex> q_initial=<g>
//       min_contribution=<g> strategy=<basic|cost_based>   (one header line)
//   <iter> <hp_before csv> <hp_eval csv> <q_eval csv> <contrib csv>
//       <idx> <0|1> <q_best_after>                         (one record line)
// A multi-pass run concatenates one section per pass, in pass order.
std::string format_trajectory(const TrajectoryHeader& header,
                              const std::vector<IterationTrace>& entries);

std::vector<TrajectorySection> parse_trajectory(const std::string& text);

// Replays acceptance and idle bookkeeping from a section alone. `ok` is
// false at the first line whose accepted flag, q_best, or contribution
// column contradicts the replay.
struct TrajectoryCheck {
  bool ok = true;
  std::string detail;
  double q_best = 0.0;     // replayed final best
  std::size_t idle = 0;    // replayed final idle counter
  std::size_t accepted = 0;
};

TrajectoryCheck check_trajectory(const TrajectorySection& section);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace obtune
