#pragma once

// Run configuration, scenario dispatch and report emission.

#include "specobs/spectral_core.hpp"
#include "specobs/square_model.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace specobs::report {

inline constexpr const char* kToolkitVersion = "0.1.0";
inline constexpr int kCsvLayoutVersion = 1;

enum ExitCode : int {
  kExitPass = 0,
  kExitVerdictFailed = 2,
  kExitParseError = 3,
  kExitNumericFailure = 4,
  kExitSchemaError = 5,
  kExitInvariantError = 6,
};

class ConfigError : public std::runtime_error {
 public:
  enum class Kind { Parse, Schema, Invariant };
  ConfigError(Kind kind, int line, const std::string& what);
  Kind kind() const { return kind_; }
  int line() const { return line_; }  // 1-based, 0 when unknown
  int exit_code() const;

 private:
  Kind kind_;
  int line_;
};

enum class Scenario {
  VerifyCutoff,
  CoercivityScan,
  ResolventScan,
  WeakObservability,
  AssumptionI,
  AssumptionII_III,
  Admissibility,
};

const char* to_string(Scenario s);
Scenario scenario_from_string(const std::string& name);  // throws std::invalid_argument

struct SquareConfig {
  std::vector<square::BoundaryPatch> gamma;
  int n_max_eigenvalue;
};

struct CustomConfig {
  RealVector eigenvalues;
  ComplexMatrix gram;
};

struct RunConfig {
  std::variant<std::monostate, SquareConfig, CustomConfig> system;
  Scenario scenario = Scenario::VerifyCutoff;
  double epsilon_cluster = 0.5;
  int trials = 100;
  std::uint64_t seed = 1;
  std::optional<double> T;
  std::string output_path;
  std::string source_text;  // document as read, for the config hash
};

// Parses a YAML document. Angles accept numbers or "pi", "pi/4", "3pi/4",
// "3*pi/4".
RunConfig load_config_text(const std::string& text);
RunConfig load_config_file(const std::string& path);

double parse_angle(const std::string& text);  // throws std::invalid_argument

// FNV-1a over the document and the effective overrides, hex.
std::string config_hash(const RunConfig& cfg);

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct Verdict {
  std::string name;
  bool pass;
  std::string detail;
};

struct ReportBundle {
  std::string scenario;
  std::string version;
  std::string config_hash;
  std::uint64_t seed;
  std::vector<std::pair<std::string, double>> constants;
  std::vector<std::pair<std::string, double>> summary;
  std::vector<Table> tables;
  std::vector<Verdict> verdicts;

  bool all_pass() const;
};

// Deterministic in (cfg, seed). Module errors are rethrown with the
// scenario name prefixed.
ReportBundle run_scenario(const RunConfig& cfg);

void write_structured(std::ostream& out, const ReportBundle& bundle);
void write_csv(std::ostream& out, const Table& table);
void write_summary(std::ostream& out, const ReportBundle& bundle);

// Shortest form with at least 17 significant digits, '.' decimal point.
std::string format_number(double v);

}  // namespace specobs::report
