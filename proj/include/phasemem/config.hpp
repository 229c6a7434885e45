#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "phasemem/limitstudy.hpp"
#include "phasemem/mms.hpp"
#include "phasemem/solver.hpp"

namespace phasemem {

/// Malformed or inadmissible configuration. `field` is a dotted path into the document,
/// `line` is 1-based for syntax errors and 0 otherwise.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message, int line = 0)
      : std::runtime_error(format(field, message, line)), field_(std::move(field)), line_(line) {}

  const std::string& field() const noexcept { return field_; }
  int line() const noexcept { return line_; }

 private:
  static std::string format(const std::string& field, const std::string& message, int line) {
    std::string s = "config error";
    if (line > 0) s += " at line " + std::to_string(line);
    if (!field.empty()) s += " in '" + field + "'";
    return s + ": " + message;
  }
  std::string field_;
  int line_;
};

struct RunSettings {
  ProblemConfig problem;
  std::vector<double> epsilons{0.4, 0.2, 0.1, 0.05, 0.025};
  int parallelism = 1;
  ManufacturedOptions mms;
  int coercivity_grid = 128;
  int output_every = 1;
  /// The document as loaded, with defaults filled in (JSON text).
  std::string resolved;
};

/// Parses a JSON configuration document. Every hypothesis violation is reported as a
/// ConfigError whose message names the violated hypothesis.
RunSettings parse_config(const std::string& text);
RunSettings load_config(const std::filesystem::path& path);

SweepPlan make_sweep_plan(const RunSettings& settings);

}  // namespace phasemem
