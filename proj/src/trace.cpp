#include "sdfo/trace.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "sdfo/errors.hpp"

namespace sdfo {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw InputError("trace csv line " + std::to_string(line_no) + ": bad number '" + s + "'");
  return v;
}

std::uint64_t parse_uint(const std::string& s, std::size_t line_no) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw InputError("trace csv line " + std::to_string(line_no) + ": bad integer '" + s + "'");
  return v;
}

}  // namespace

bool IterationRecord::same_row(const IterationRecord& o) const {
  return k == o.k && success == o.success && delta == o.delta && step_norm == o.step_norm &&
         f_true_current == o.f_true_current && est_current == o.est_current && est_trial == o.est_trial &&
         samples_current == o.samples_current && samples_trial == o.samples_trial;
}

const std::vector<std::string>& trace_columns() {
  static const std::vector<std::string> kColumns = {"k",          "success",        "delta",
                                                    "step_norm",  "f_true_current", "est_current",
                                                    "est_trial",  "samples_current", "samples_trial"};
  return kColumns;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trace_csv(std::ostream& out, const Trace& trace, const std::string& comment) {
  out << "# sdfo schema_version=" << kTraceSchemaVersion;
  if (!comment.empty()) out << ' ' << comment;
  out << '\n';
  const auto& cols = trace_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& r : trace) {
    out << r.k << ',' << (r.success ? 1 : 0) << ',' << format_double(r.delta) << ',' << format_double(r.step_norm)
        << ',' << format_double(r.f_true_current) << ',' << format_double(r.est_current) << ','
        << format_double(r.est_trial) << ',' << r.samples_current << ',' << r.samples_trial << '\n';
  }
}

Trace read_trace_csv(std::istream& in) {
  Trace trace;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto cells = split(line);
    if (!header_seen) {
      if (cells != trace_columns())
        throw InputError("trace csv line " + std::to_string(line_no) + ": unexpected header");
      header_seen = true;
      continue;
    }
    if (cells.size() != trace_columns().size())
      throw InputError("trace csv line " + std::to_string(line_no) + ": expected " +
                       std::to_string(trace_columns().size()) + " columns");
    IterationRecord r;
    r.k = parse_uint(cells[0], line_no);
    const auto flag = parse_uint(cells[1], line_no);
    if (flag > 1) throw InputError("trace csv line " + std::to_string(line_no) + ": success must be 0 or 1");
    r.success = flag == 1;
    r.delta = parse_double(cells[2], line_no);
    r.step_norm = parse_double(cells[3], line_no);
    r.f_true_current = parse_double(cells[4], line_no);
    r.est_current = parse_double(cells[5], line_no);
    r.est_trial = parse_double(cells[6], line_no);
    r.samples_current = parse_uint(cells[7], line_no);
    r.samples_trial = parse_uint(cells[8], line_no);
    trace.push_back(std::move(r));
  }
  if (!header_seen) throw InputError("trace csv: missing header");
  return trace;
}

}  // namespace sdfo
