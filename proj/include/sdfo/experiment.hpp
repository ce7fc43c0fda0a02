#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sdfo/config.hpp"
#include "sdfo/diagnostics.hpp"
#include "sdfo/tail_audit.hpp"

namespace sdfo {

struct RunOptions {
  unsigned jobs = 1;
  std::optional<std::string> out_dir;  // overrides SDFO_OUT_DIR and the config
  std::uint64_t seed_offset = 0;
};

/// --out, then $SDFO_OUT_DIR, then output.dir from the config.
std::string resolve_output_dir(const ExperimentConfig& cfg, const RunOptions& opts);

/// Advisory theta checks for the configured algorithm (empty when fine).
std::vector<std::string> theta_warnings(const ExperimentConfig& cfg);

struct SeedRun {
  std::uint64_t seed = 0;
  Trace trace;
  Vector final_x;
  double final_delta = 0.0;
  std::optional<RunSummary> summary;  // absent for zero-iteration runs
};

/// One optimization run. The oracle stream is derive_seed(seed, 0); a
/// uniform_random direction stream uses derive_seed(directions.seed, seed).
SeedRun run_single(const ExperimentConfig& cfg, std::uint64_t seed);

std::string trace_filename(const ExperimentConfig& cfg, std::uint64_t seed);
std::string summary_filename(const ExperimentConfig& cfg);

struct ExperimentResult {
  std::vector<SeedRun> runs;  // in seed order
  std::vector<std::string> files;
};

/// Runs every seed (plus seed_offset), up to `jobs` at a time, and writes
/// one trace per seed and one summary per batch.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts);

struct AuditResult {
  std::vector<AuditReport> reports;
  std::optional<VarianceReport> variance;
  std::vector<std::string> files;
  bool pass() const;
};

AuditResult run_audit(const ExperimentConfig& cfg, const RunOptions& opts);

}  // namespace sdfo
