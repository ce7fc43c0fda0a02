#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "sdfo/oracle.hpp"
#include "sdfo/trace.hpp"

namespace sdfo {

struct RunSummary {
  std::uint64_t seed = 0;
  std::uint64_t iterations = 0;
  double final_delta = 0.0;  // delta of the last recorded iteration
  double cum_delta_sq = 0.0;
  /// Share of cum_delta_sq contributed by the last ceil(iterations / 10) rows.
  double tail_fraction = 0.0;
  double final_f_true = 0.0;  // f at the last recorded iterate
  std::optional<double> gap;  // final_f_true - f*
  double success_rate = 0.0;
  /// Not derived from the trace; filled by the harness from the final iterate.
  std::optional<double> stationarity;

  bool operator==(const RunSummary&) const = default;
};

/// Exact aggregation of the serialized trace columns. Throws InputError on
/// an empty trace.
RunSummary summarize(const Trace& trace, std::uint64_t seed, std::optional<double> optimum = {});

/// Distance from x to the nearest known stationary point of the problem.
/// Throws UnsupportedProblemError when none is known.
double stationarity_proxy(const Vector& x, const TestProblem& problem);

/// ||s_k / ||s_k|| + g_k|| per iteration. Throws InputError when a record
/// lacks its step or direction, or has a zero step.
std::vector<double> alignment_profile(const Trace& trace);

void write_summary_csv(std::ostream& out, const std::vector<RunSummary>& rows);

}  // namespace sdfo
