#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sdfo/linalg.hpp"

namespace sdfo {

/// One optimization iteration.
struct IterationRecord {
  std::uint64_t k = 0;
  bool success = false;
  double delta = 0.0;
  double step_norm = 0.0;
  double f_true_current = 0.0;
  double est_current = 0.0;
  double est_trial = 0.0;
  std::uint64_t samples_current = 0;
  std::uint64_t samples_trial = 0;

  // Not serialized.
  std::uint64_t samples_model = 0;  // extra oracle draws spent building B_k
  bool on_boundary = false;
  Vector direction;  // g_k
  Vector step;       // trial displacement (Delta g for direct search, s for trust region)

  /// Compares the serialized columns only.
  bool same_row(const IterationRecord& other) const;
};

using Trace = std::vector<IterationRecord>;

inline constexpr int kTraceSchemaVersion = 1;

/// "%.17g": round-trips every finite double.
std::string format_double(double v);

/// Header comment line, column header, one row per record.
void write_trace_csv(std::ostream& out, const Trace& trace, const std::string& comment = "");
/// Skips lines starting with '#'. Throws InputError on malformed input.
Trace read_trace_csv(std::istream& in);

const std::vector<std::string>& trace_columns();

}  // namespace sdfo
