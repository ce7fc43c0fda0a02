#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sdfo/direct_search.hpp"
#include "sdfo/errors.hpp"
#include "sdfo/oracle.hpp"
#include "sdfo/tail_audit.hpp"
#include "sdfo/trust_region.hpp"

namespace sdfo {

/// Parse or validation failure; the message names the line or the field.
struct ConfigError : InputError {
  using InputError::InputError;
};

enum class Algorithm { DirectSearch, TrustRegion, Audit };
std::string to_string(Algorithm a);

struct ProblemSpec {
  std::string name = "sphere";
  std::size_t dimension = 2;
  std::optional<Vector> x0;  // problem default when absent
  bool operator==(const ProblemSpec&) const = default;
};

struct DirectionSpec {
  std::string scheme = "quasi_random";  // quasi_random | uniform_random | fixed_cycle
  std::uint64_t seed = 0;               // uniform_random only
  std::vector<Vector> vectors;          // fixed_cycle only
  bool operator==(const DirectionSpec&) const = default;
};

struct AuditBlock {
  TailAuditSpec spec;
  double k_f = 1.0;
  std::optional<Vector> x;  // problem default start when absent
  std::optional<Vector> g;  // e_1 when absent
  std::vector<std::string> checks = {"a1", "a2", "variance"};  // also "generalized"
  unsigned threads = 1;
  bool operator==(const AuditBlock&) const = default;
};

struct OutputSpec {
  std::string dir = "sdfo_out";
  bool trace_csv = true;
  bool summary_csv = true;
  bool operator==(const OutputSpec&) const = default;
};

/// A fully resolved experiment: every default has been filled in, so
/// to_json_text and parse_config round-trip to an equal value.
struct ExperimentConfig {
  static constexpr int kSchemaVersion = 1;
  int schema_version = kSchemaVersion;
  Algorithm algorithm = Algorithm::DirectSearch;
  ProblemSpec problem;
  NoiseModel noise = NoiseModel::none();
  SamplerPolicy sampler;
  DirectionSpec directions;
  DirectSearchConfig direct_search;
  TrustRegionConfig trust_region;
  AuditBlock audit;
  std::vector<std::uint64_t> seeds = {0};
  OutputSpec output;

  bool operator==(const ExperimentConfig&) const = default;
};

/// JSON text to config. Syntax errors carry the line number; semantic
/// errors name the field. Throws ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string to_json_text(const ExperimentConfig& cfg);

}  // namespace sdfo
