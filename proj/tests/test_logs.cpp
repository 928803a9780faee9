#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>

#include <doctest.h>

#include "obtune/errors.hpp"
#include "obtune/logs.hpp"
#include "obtune/observer.hpp"
#include "obtune/random.hpp"
#include "obtune/synthetic.hpp"
#include "support/stubs.hpp"

using namespace obtune;

namespace {

ExperimentLog sample_log(std::size_t count, std::uint64_t seed) {
  const HyperParamSpace space = canonical_space();
  return run_bootstrap(space, canonical_objective().bind(space), count, seed);
}

TuneResult sample_run(std::uint64_t seed, double min_contribution = 0.001) {
  const HyperParamSpace space = canonical_space();
  const ExperimentLog log = sample_log(80, seed);
  const MapperObserver observer = fit_observer(log, MapperKind::Knn);
  BasicTunerConfig config;
  config.min_contribution = min_contribution;
  config.seed = mix(seed, 2);
  return basic_adjust(observer, space, config);
}

}  // namespace

TEST_CASE("doubles survive the text round trip bit for bit") {
  SplitMix64 rng(13);
  for (int i = 0; i < 2000; ++i) {
    const double v = (rng.next_double() - 0.5) * std::pow(10.0, rng.next_int(-12, 12));
    CHECK(parse_double_strict(fmt_double(v)) == v);
  }
  CHECK(parse_double_strict(fmt_double(0.0)) == 0.0);
  CHECK_THROWS_AS(parse_double_strict("1.5x"), std::runtime_error);
  CHECK_THROWS_AS(parse_double_strict(""), std::runtime_error);
}

TEST_CASE("experiment logs round-trip exactly") {
  const ExperimentLog log = sample_log(30, 17);
  const std::string text = format_experiment_log(log);
  const ExperimentLog parsed = parse_experiment_log(text, log.space());
  CHECK(parsed.digest() == log.digest());
  CHECK(parsed.seed() == log.seed());
  REQUIRE(parsed.size() == log.size());
  for (std::size_t i = 0; i < log.size(); ++i) {
    CHECK(parsed.records()[i].hp == log.records()[i].hp);
    CHECK(parsed.records()[i].quality == log.records()[i].quality);
  }
  // formatting the parse reproduces the bytes
  CHECK(format_experiment_log(parsed) == text);
}

TEST_CASE("experiment log parsing rejects foreign spaces and bad records") {
  const ExperimentLog log = sample_log(5, 17);
  const std::string text = format_experiment_log(log);

  const HyperParamSpace other(
      {{"x0", ParamKind::Continuous, 0.0, 2.0, {}},
       {"x1", ParamKind::Continuous, 0.0, 1.0, {}}});
  CHECK_THROWS_AS(parse_experiment_log(text, other), SpaceMismatchError);

  CHECK_THROWS_AS(parse_experiment_log("", log.space()), std::runtime_error);
  CHECK_THROWS_AS(parse_experiment_log("#wrong header\n", log.space()),
                  std::runtime_error);

  // shuffled record indices are caught
  std::string reordered = text;
  const std::size_t first_record = reordered.find('\n') + 1;
  reordered[first_record] = '3';
  CHECK_THROWS_AS(parse_experiment_log(reordered, log.space()),
                  std::runtime_error);
}

TEST_CASE("trajectories round-trip exactly") {
  const TuneResult result = sample_run(23);
  REQUIRE_FALSE(result.trajectory.empty());
  const TrajectoryHeader header{1, canonical_space().digest(),
                                result.initial_q, 0.001,
                                StrategyKind::Basic};
  const std::string text = format_trajectory(header, result.trajectory);

  const std::vector<TrajectorySection> sections = parse_trajectory(text);
  REQUIRE(sections.size() == 1);
  const TrajectorySection& s = sections[0];
  CHECK(s.header.space_digest == header.space_digest);
  CHECK(s.header.q_initial == header.q_initial);
  CHECK(s.header.min_contribution == header.min_contribution);
  CHECK(s.header.strategy == header.strategy);
  REQUIRE(s.entries.size() == result.trajectory.size());
  for (std::size_t i = 0; i < s.entries.size(); ++i) {
    const IterationTrace& a = s.entries[i];
    const IterationTrace& b = result.trajectory[i];
    CHECK(a.iteration == b.iteration);
    CHECK(a.hp_before == b.hp_before);
    CHECK(a.hp_eval == b.hp_eval);
    CHECK(a.q_eval == b.q_eval);
    CHECK(a.contributions == b.contributions);
    CHECK(a.chosen == b.chosen);
    CHECK(a.accepted == b.accepted);
    CHECK(a.q_best_after == b.q_best_after);
  }
  CHECK(format_trajectory(s.header, s.entries) == text);
}

TEST_CASE("multi-section trajectories parse in pass order") {
  const TuneResult run1 = sample_run(23);
  const TuneResult run2 = sample_run(24);
  const std::uint64_t digest = canonical_space().digest();
  const std::string text =
      format_trajectory({1, digest, run1.initial_q, 0.001,
                         StrategyKind::Basic},
                        run1.trajectory) +
      format_trajectory({1, digest, run2.initial_q, 0.001,
                         StrategyKind::Basic},
                        run2.trajectory);
  const std::vector<TrajectorySection> sections = parse_trajectory(text);
  REQUIRE(sections.size() == 2);
  CHECK(sections[0].entries.size() == run1.trajectory.size());
  CHECK(sections[1].entries.size() == run2.trajectory.size());
  CHECK(sections[0].header.q_initial == run1.initial_q);
  CHECK(sections[1].header.q_initial == run2.initial_q);
}

TEST_CASE("trajectory parsing rejects malformed input") {
  CHECK_THROWS_AS(parse_trajectory(""), std::runtime_error);
  CHECK_THROWS_AS(parse_trajectory("0 0.1 0.2 0.3 0.0 0 1 0.3\n"),
                  std::runtime_error);  // record before any header
  const std::string good_header =
      "#obtune trajectory schema=1 space=0123456789abcdef q_initial=0.5 "
      "min_contribution=0.001 strategy=basic\n";
  CHECK_NOTHROW(parse_trajectory(good_header));
  CHECK_THROWS_AS(parse_trajectory(good_header + "0 0.1 0.2\n"),
                  std::runtime_error);  // short record
  CHECK_THROWS_AS(
      parse_trajectory(good_header + "0 0.1 0.2 0.3 0.0 9 1 0.3\n"),
      std::runtime_error);  // chosen index out of range
  CHECK_THROWS_AS(
      parse_trajectory(good_header + "0 0.1 0.2 0.3 0.0 0 2 0.3\n"),
      std::runtime_error);  // accepted flag not 0/1
}

TEST_CASE("check_trajectory accepts every faithful run") {
  for (const std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL}) {
    const TuneResult result = sample_run(seed);
    const TrajectorySection section{
        {1, canonical_space().digest(), result.initial_q, 0.001,
         StrategyKind::Basic},
        result.trajectory};
    const TrajectoryCheck check = check_trajectory(section);
    CAPTURE(check.detail);
    CHECK(check.ok);
    CHECK(check.q_best == result.q_best);
    CHECK(check.idle == result.idle);
  }
}

TEST_CASE("check_trajectory flags every kind of books-cooking") {
  const TuneResult result = sample_run(23);
  REQUIRE(result.trajectory.size() >= 2);
  const TrajectoryHeader header{1, canonical_space().digest(),
                                result.initial_q, 0.001,
                                StrategyKind::Basic};

  auto corrupted = [&](auto mutate) {
    std::vector<IterationTrace> entries = result.trajectory;
    mutate(entries);
    return check_trajectory({header, entries});
  };

  CHECK_FALSE(corrupted([](auto& e) { e[1].iteration = 7; }).ok);
  CHECK_FALSE(corrupted([](auto& e) { e[1].hp_before[0] += 0.5; }).ok);
  CHECK_FALSE(corrupted([](auto& e) { e[0].q_best_after += 0.01; }).ok);
  CHECK_FALSE(corrupted([](auto& e) { e[0].accepted = !e[0].accepted; }).ok);
  CHECK_FALSE(
      corrupted([](auto& e) { e[0].contributions[0] += 0.25; }).ok);
  CHECK_FALSE(corrupted([](auto& e) {
                e[0].chosen = (e[0].chosen + 1) % e[0].q_eval.size();
              }).ok);
  // inflating a q_eval entry past the chosen one breaks the argmax claim
  CHECK_FALSE(corrupted([](auto& e) {
                const std::size_t other = (e[0].chosen + 1) % e[0].q_eval.size();
                e[0].q_eval[other] = 2.0;
              }).ok);
}

TEST_CASE("text files write and read back verbatim") {
  const std::string path =
      (std::filesystem::temp_directory_path() / "obtune_logs_test.txt")
          .string();
  const std::string payload = "line one\nline two\n";
  write_text_file(path, payload);
  CHECK(read_text_file(path) == payload);
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_text_file(path), std::runtime_error);
}
