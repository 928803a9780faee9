#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace obtune {

// Invalid session configuration. Carries one diagnostic per offending field
// so a CLI can report all of them at once; `what()` joins them.
class ConfigError : public std::runtime_error {
public:
  struct Diagnostic {
    std::string path;     // dotted key path, e.g. "tuner.max_idle"
    std::string message;  // what is wrong with the value at that path
  };

  explicit ConfigError(std::vector<Diagnostic> diagnostics)
      : std::runtime_error(join(diagnostics)),
        diagnostics_(std::move(diagnostics)) {}

  ConfigError(std::string path, std::string message)
      : ConfigError(std::vector<Diagnostic>{
            {std::move(path), std::move(message)}}) {}

  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

private:
  static std::string join(const std::vector<Diagnostic>& ds) {
    std::string out = "invalid configuration:";
    for (const Diagnostic& d : ds) out += "\n  " + d.path + ": " + d.message;
    return out;
  }

  std::vector<Diagnostic> diagnostics_;
};

// Too few bootstrap records to fit a mapper of the requested kind.
class InsufficientDataError : public std::runtime_error {
public:
  InsufficientDataError(std::size_t available, std::size_t required)
      : std::runtime_error("insufficient experiments: have " +
                           std::to_string(available) + ", need at least " +
                           std::to_string(required)),
        available_(available),
        required_(required) {}

  std::size_t available() const { return available_; }
  std::size_t required() const { return required_; }

private:
  std::size_t available_;
  std::size_t required_;
};

// A fitted artifact was asked to operate on a space other than the one it
// was fitted against, detected via the space digest.
class SpaceMismatchError : public std::runtime_error {
public:
  SpaceMismatchError(std::uint64_t expected, std::uint64_t actual)
      : std::runtime_error("space digest mismatch"),
        expected_(expected),
        actual_(actual) {}

  std::uint64_t expected() const { return expected_; }
  std::uint64_t actual() const { return actual_; }

private:
  std::uint64_t expected_;
  std::uint64_t actual_;
};

}  // namespace obtune
