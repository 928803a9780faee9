#include "obtune/logs.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "obtune/errors.hpp"
#include "obtune/hash.hpp"

namespace obtune {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double_strict(const std::string& token) {
  if (token.empty()) throw std::runtime_error("empty number");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end != token.c_str() + token.size() || errno == ERANGE)
    throw std::runtime_error("malformed number '" + token + "'");
  return v;
}

namespace {

std::uint64_t parse_u64_strict(const std::string& token) {
  if (token.empty()) throw std::runtime_error("empty integer");
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(token.c_str(), &end, 10);
  if (end != token.c_str() + token.size() || errno == ERANGE ||
      token[0] == '-')
    throw std::runtime_error("malformed integer '" + token + "'");
  return v;
}

std::uint64_t parse_hex16(const std::string& token) {
  if (token.size() != 16) throw std::runtime_error("digest must be 16 hex");
  std::uint64_t v = 0;
  for (char c : token) {
    v <<= 4;
    if (c >= '0' && c <= '9') v |= static_cast<std::uint64_t>(c - '0');
    else if (c >= 'a' && c <= 'f') v |= static_cast<std::uint64_t>(c - 'a' + 10);
    else throw std::runtime_error("digest must be lowercase hex");
  }
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string token;
  for (char c : line) {
    if (c == sep) {
      out.push_back(token);
      token.clear();
    } else {
      token += c;
    }
  }
  out.push_back(token);
  return out;
}

std::vector<double> parse_csv_doubles(const std::string& field) {
  std::vector<double> out;
  for (const std::string& token : split(field, ','))
    out.push_back(parse_double_strict(token));
  return out;
}

std::string join_csv(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += fmt_double(values[i]);
  }
  return out;
}

// `key=value` with an exact key, value returned
std::string keyed(const std::string& token, const std::string& key) {
  const std::string prefix = key + "=";
  if (token.compare(0, prefix.size(), prefix) != 0)
    throw std::runtime_error("expected " + key + "=..., got '" + token + "'");
  return token.substr(prefix.size());
}

[[noreturn]] void fail_line(std::size_t line_no, const std::string& what) {
  throw std::runtime_error("line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

std::string format_experiment_log(const ExperimentLog& log) {
  std::string out = "#obtune experiments schema=1 seed=";
  out += std::to_string(log.seed());
  out += " space=";
  out += to_hex(log.space().digest());
  out += '\n';
  for (const ExperimentRecord& r : log.records()) {
    out += std::to_string(r.index);
    out += ' ';
    out += join_csv(r.hp.values);
    out += ' ';
    out += fmt_double(r.quality);
    out += '\n';
  }
  return out;
}

ExperimentLog parse_experiment_log(const std::string& text,
                                   const HyperParamSpace& space) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty experiment log");

  const std::vector<std::string> head = split(line, ' ');
  if (head.size() != 5 || head[0] != "#obtune" || head[1] != "experiments")
    fail_line(1, "bad experiment log header");
  if (keyed(head[2], "schema") != "1")
    fail_line(1, "unsupported schema '" + head[2] + "'");
  const std::uint64_t seed = parse_u64_strict(keyed(head[3], "seed"));
  const std::uint64_t digest = parse_hex16(keyed(head[4], "space"));
  if (digest != space.digest())
    throw SpaceMismatchError(space.digest(), digest);

  ExperimentLog log(space, seed);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) fail_line(line_no, "blank record line");
    const std::vector<std::string> fields = split(line, ' ');
    if (fields.size() != 3) fail_line(line_no, "expected 3 fields");
    try {
      const std::uint64_t index = parse_u64_strict(fields[0]);
      if (index != log.size()) fail_line(line_no, "record index out of order");
      std::vector<double> values = parse_csv_doubles(fields[1]);
      const double quality = parse_double_strict(fields[2]);
      log.append(HyperParamVector(std::move(values)), quality);
    } catch (const std::runtime_error&) {
      throw;
    } catch (const std::exception& e) {
      fail_line(line_no, e.what());
    }
  }
  return log;
}

std::string format_trajectory(const TrajectoryHeader& header,
                              const std::vector<IterationTrace>& entries) {
  std::string out = "#obtune trajectory schema=";
  out += std::to_string(header.schema);
  out += " space=";
  out += to_hex(header.space_digest);
  out += " q_initial=";
  out += fmt_double(header.q_initial);
  out += " min_contribution=";
  out += fmt_double(header.min_contribution);
  out += " strategy=";
  out += to_string(header.strategy);
  out += '\n';
  for (const IterationTrace& t : entries) {
    out += std::to_string(t.iteration);
    out += ' ';
    out += join_csv(t.hp_before.values);
    out += ' ';
    out += join_csv(t.hp_eval);
    out += ' ';
    out += join_csv(t.q_eval);
    out += ' ';
    out += join_csv(t.contributions);
    out += ' ';
    out += std::to_string(t.chosen);
    out += ' ';
    out += t.accepted ? '1' : '0';
    out += ' ';
    out += fmt_double(t.q_best_after);
    out += '\n';
  }
  return out;
}

std::vector<TrajectorySection> parse_trajectory(const std::string& text) {
  std::vector<TrajectorySection> sections;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) fail_line(line_no, "blank line");
    if (line[0] == '#') {
      const std::vector<std::string> head = split(line, ' ');
      if (head.size() != 7 || head[0] != "#obtune" ||
          head[1] != "trajectory")
        fail_line(line_no, "bad trajectory header");
      TrajectoryHeader header;
      if (keyed(head[2], "schema") != "1")
        fail_line(line_no, "unsupported schema '" + head[2] + "'");
      header.schema = 1;
      header.space_digest = parse_hex16(keyed(head[3], "space"));
      header.q_initial = parse_double_strict(keyed(head[4], "q_initial"));
      header.min_contribution =
          parse_double_strict(keyed(head[5], "min_contribution"));
      const std::string strategy = keyed(head[6], "strategy");
      if (strategy == "basic") header.strategy = StrategyKind::Basic;
      else if (strategy == "cost_based")
        header.strategy = StrategyKind::CostBased;
      else fail_line(line_no, "unknown strategy '" + strategy + "'");
      sections.push_back({header, {}});
      continue;
    }
    if (sections.empty()) fail_line(line_no, "record before any header");
    const std::vector<std::string> fields = split(line, ' ');
    if (fields.size() != 8) fail_line(line_no, "expected 8 fields");
    IterationTrace t;
    t.iteration = parse_u64_strict(fields[0]);
    t.hp_before = HyperParamVector(parse_csv_doubles(fields[1]));
    t.hp_eval = parse_csv_doubles(fields[2]);
    t.q_eval = parse_csv_doubles(fields[3]);
    t.contributions = parse_csv_doubles(fields[4]);
    t.chosen = parse_u64_strict(fields[5]);
    if (fields[6] != "0" && fields[6] != "1")
      fail_line(line_no, "accepted flag must be 0 or 1");
    t.accepted = fields[6] == "1";
    t.q_best_after = parse_double_strict(fields[7]);
    const std::size_t n = t.hp_before.size();
    if (t.hp_eval.size() != n || t.q_eval.size() != n ||
        t.contributions.size() != n || t.chosen >= n)
      fail_line(line_no, "column lengths disagree");
    sections.back().entries.push_back(std::move(t));
  }
  if (sections.empty()) throw std::runtime_error("empty trajectory log");
  return sections;
}

TrajectoryCheck check_trajectory(const TrajectorySection& section) {
  TrajectoryCheck check;
  double q_best = section.header.q_initial;
  std::size_t idle = 0;
  const bool basic = section.header.strategy == StrategyKind::Basic;

  auto fail = [&check](std::size_t i, const std::string& what) {
    check.ok = false;
    check.detail = "iteration " + std::to_string(i) + ": " + what;
  };

  for (std::size_t i = 0; i < section.entries.size() && check.ok; ++i) {
    const IterationTrace& t = section.entries[i];
    if (t.iteration != i) {
      fail(i, "iteration numbering broken");
      break;
    }
    if (i > 0) {
      // the mutation is unconditional: this hp must be the previous hp
      // with exactly the chosen coordinate swapped for its proposal
      const IterationTrace& prev = section.entries[i - 1];
      for (std::size_t j = 0; j < t.hp_before.size(); ++j) {
        const double expected = j == prev.chosen ? prev.hp_eval[j]
                                                 : prev.hp_before[j];
        if (t.hp_before[j] != expected) {
          fail(i, "hp_before contradicts the previous update");
          break;
        }
      }
      if (!check.ok) break;
    }
    if (basic) {
      // cost-based contributions need the theta functions, which the log
      // does not carry; only the basic ones are replayable
      for (std::size_t j = 0; j < t.contributions.size(); ++j) {
        if (t.contributions[j] != t.q_eval[j] - q_best) {
          fail(i, "contribution column contradicts q_eval - q_best");
          break;
        }
      }
      if (!check.ok) break;
      std::size_t expected_idx = 0;
      for (std::size_t j = 1; j < t.q_eval.size(); ++j)
        if (t.q_eval[expected_idx] < t.q_eval[j]) expected_idx = j;
      if (t.chosen != expected_idx) {
        fail(i, "chosen index is not the argmax of q_eval");
        break;
      }
    }
    const bool expected_accept =
        t.q_eval[t.chosen] - q_best > section.header.min_contribution;
    if (t.accepted != expected_accept) {
      fail(i, "accepted flag contradicts the replayed gain");
      break;
    }
    if (t.accepted) {
      q_best = t.q_eval[t.chosen];
      idle = 0;
      ++check.accepted;
    } else {
      ++idle;
    }
    if (t.q_best_after != q_best) {
      fail(i, "q_best_after contradicts the replay");
      break;
    }
  }

  check.q_best = q_best;
  check.idle = idle;
  return check;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
  if (!out.flush()) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace obtune
