#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace lipwidth {

inline constexpr const char* kToolName = "lipwidth";
inline constexpr const char* kToolVersion = "1.0.0";

/// Process exit codes.
enum class ExitCode : int { Pass = 0, Usage = 1, Violation = 2, Numeric = 3 };

enum class OutputFormat { Json, Csv, Both };

/// A validated experiment description. `target` is a FiniteSet object for the
/// set commands, a case-study name for case-study and unused otherwise.
struct ExperimentConfig {
  std::string command;
  nlohmann::json target;
  nlohmann::json params = nlohmann::json::object();
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::optional<std::string> out_dir;
  OutputFormat format = OutputFormat::Json;
  bool verify_witness = false;

  nlohmann::json to_json() const;
};

/// Commands accepted in the "command" field.
const std::vector<std::string>& known_commands();

/// Parses and validates a config; unknown fields and malformed values raise
/// PreconditionError. Parameters are checked against the command's list.
ExperimentConfig parse_config(const nlohmann::json& j);
void validate_config(const ExperimentConfig& config);

/// Everything a run produced. `canonical()` omits the wall-clock field and is
/// byte-identical across runs with the same config, seed and version.
struct RunReport {
  nlohmann::json config;
  nlohmann::json results = nlohmann::json::object();
  nlohmann::json certificates = nlohmann::json::array();
  nlohmann::json audits = nlohmann::json::array();
  nlohmann::json table = nlohmann::json::array();
  nlohmann::json witness_checks = nlohmann::json::array();
  std::optional<std::string> failure;  ///< numeric failure message
  double wall_clock_seconds = 0.0;

  bool pass() const;
  ExitCode exit_code() const;
  nlohmann::json to_json() const;
  nlohmann::json canonical() const;
  std::string csv() const;
};

/// Dispatches one experiment. Numeric failures are captured in the report;
/// precondition errors propagate.
RunReport run(const ExperimentConfig& config);

/// Invariant suite over every module, deterministic in the seed.
RunReport audit_all(std::uint64_t seed, unsigned workers = 1);

/// Writes report.json and/or report.csv under the directory, creating it.
void write_report(const RunReport& report, const std::string& dir, OutputFormat format);

}  // namespace lipwidth
