#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rdual/model.hpp"
#include "rdual/utility.hpp"

namespace rdual {

/// Syntax error in a scenario file. what() reads "line N: message".
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

struct UtilityConfig {
  std::string name = "EXP";  // EXP | GLUED | custom-table
  double risk_aversion = 1.0;
  std::vector<ExpTerm> coefficients;  // custom-table only
  bool numeric = false;

  friend bool operator==(const UtilityConfig& a, const UtilityConfig& b);
};

struct SolverConfig {
  double tol = 1e-6;
  int max_iter = 10000;
  std::uint64_t seed = 0;

  friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

UtilitySpec make_utility(const UtilityConfig& config);

struct ScenarioBundle {
  ScenarioModel model;
  PriorSet priors;
  UtilityConfig utility_config;
  UtilitySpec utility;
  SolverConfig solver;
  std::map<std::string, Vector> named_claims;
  Vector q_equivalent;  // equivalent martingale measure found during validation

  /// Same bundle with model.claim replaced by a named claim; throws
  /// std::out_of_range for unknown names.
  ScenarioBundle with_named_claim(const std::string& name) const;
};

/// Parses and validates. Syntax problems raise ParseError; violated
/// assumptions raise ValidationError with a "line N: " prefix when the
/// offending section is known.
ScenarioBundle parse_scenario_text(const std::string& text);
ScenarioBundle parse_scenario(const std::filesystem::path& path);

/// Canonical text form; parse_scenario_text(emit_scenario(b)) equals b.
std::string emit_scenario(const ScenarioBundle& bundle);

bool bundles_equal(const ScenarioBundle& a, const ScenarioBundle& b);

}  // namespace rdual
