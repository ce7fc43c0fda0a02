#include "sdfo/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "sdfo/errors.hpp"

namespace sdfo {

RunSummary summarize(const Trace& trace, std::uint64_t seed, std::optional<double> optimum) {
  if (trace.empty()) throw InputError("summarize: empty trace");
  RunSummary s;
  s.seed = seed;
  s.iterations = trace.size();
  const std::size_t tail_len = (trace.size() + 9) / 10;
  const std::size_t tail_begin = trace.size() - tail_len;
  double tail = 0.0;
  std::uint64_t successes = 0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const double d2 = trace[i].delta * trace[i].delta;
    s.cum_delta_sq += d2;
    if (i >= tail_begin) tail += d2;
    successes += trace[i].success ? 1 : 0;
  }
  s.tail_fraction = s.cum_delta_sq > 0.0 ? tail / s.cum_delta_sq : 0.0;
  s.final_delta = trace.back().delta;
  s.final_f_true = trace.back().f_true_current;
  if (optimum) s.gap = s.final_f_true - *optimum;
  s.success_rate = static_cast<double>(successes) / static_cast<double>(trace.size());
  return s;
}

double stationarity_proxy(const Vector& x, const TestProblem& problem) {
  if (problem.stationary_points.empty())
    throw UnsupportedProblemError("stationarity proxy: no known stationary set for problem '" + problem.name + "'");
  if (x.size() != problem.dimension) throw InputError("stationarity proxy: point has the wrong dimension");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : problem.stationary_points) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) d2 += (x[i] - p[i]) * (x[i] - p[i]);
    best = std::min(best, std::sqrt(d2));
  }
  return best;
}

std::vector<double> alignment_profile(const Trace& trace) {
  std::vector<double> out;
  out.reserve(trace.size());
  for (const auto& r : trace) {
    if (r.step.empty() || r.direction.empty() || r.step.size() != r.direction.size())
      throw InputError("alignment profile: record " + std::to_string(r.k) + " lacks its step or direction");
    const double sn = norm2(r.step);
    if (sn == 0.0) throw InputError("alignment profile: record " + std::to_string(r.k) + " has a zero step");
    double d2 = 0.0;
    for (std::size_t i = 0; i < r.step.size(); ++i) {
      const double v = r.step[i] / sn + r.direction[i];
      d2 += v * v;
    }
    out.push_back(std::sqrt(d2));
  }
  return out;
}

void write_summary_csv(std::ostream& out, const std::vector<RunSummary>& rows) {
  out << "seed,iterations,final_delta,cum_delta_sq,tail_fraction,final_f_true,gap,success_rate,stationarity\n";
  for (const auto& s : rows)
    out << s.seed << ',' << s.iterations << ',' << format_double(s.final_delta) << ','
        << format_double(s.cum_delta_sq) << ',' << format_double(s.tail_fraction) << ','
        << format_double(s.final_f_true) << ',' << (s.gap ? format_double(*s.gap) : "") << ','
        << format_double(s.success_rate) << ',' << (s.stationarity ? format_double(*s.stationarity) : "") << '\n';
}

}  // namespace sdfo
