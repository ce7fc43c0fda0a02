#include "sdfo/tail_audit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <thread>

#include "sdfo/errors.hpp"
#include "sdfo/rng.hpp"
#include "sdfo/sphere_directions.hpp"
#include "sdfo/trace.hpp"

namespace sdfo {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw InputError("tail audit: " + what);
}

std::vector<double> decrease_errors(const ErrorSample& s) {
  std::vector<double> out(s.current.size());
  for (std::size_t t = 0; t < out.size(); ++t) out[t] = s.decrease_error(t);
  return out;
}

}  // namespace

namespace {

// Centre and half-width of the Wilson score interval.
std::pair<double, double> wilson(std::uint64_t successes, std::uint64_t trials, double confidence) {
  if (trials == 0) throw InputError("wilson interval: no trials");
  if (successes > trials) throw InputError("wilson interval: successes exceed trials");
  if (!(confidence > 0.0 && confidence < 1.0)) throw InputError("wilson interval: confidence must lie in (0, 1)");
  const double z = inverse_normal_cdf(1.0 - (1.0 - confidence) / 2.0);
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (phat + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
  return {centre, half};
}

}  // namespace

double wilson_upper(std::uint64_t successes, std::uint64_t trials, double confidence) {
  const auto [centre, half] = wilson(successes, trials, confidence);
  return std::min(1.0, centre + half);
}

double wilson_lower(std::uint64_t successes, std::uint64_t trials, double confidence) {
  const auto [centre, half] = wilson(successes, trials, confidence);
  return std::max(0.0, centre - half);
}

void TailAuditSpec::validate() const {
  require(eps_f > 0.0, "eps_f must be > 0");
  require(eps_q > 0.0, "eps_q must be > 0");
  require(!p_grid.empty(), "p_grid must be nonempty");
  for (double p : p_grid) require(p > 0.0 && p <= 1.0, "p_grid entries must lie in (0, 1]");
  require(!delta_grid.empty(), "delta_grid must be nonempty");
  for (double d : delta_grid) require(d > 0.0 && std::isfinite(d), "delta_grid entries must be > 0");
  require(trials >= kMinTrials, "trials must be >= " + std::to_string(kMinTrials));
  require(confidence > 0.0 && confidence < 1.0, "confidence must lie in (0, 1)");
  require(h >= 2.0, "h must be >= 2");
  require(!alpha_grid.empty(), "alpha_grid must be nonempty");
  for (double a : alpha_grid) require(a > 0.0 && std::isfinite(a), "alpha_grid entries must be > 0");
}

bool AuditReport::pass() const {
  return std::all_of(cells.begin(), cells.end(), [](const AuditCell& c) { return c.pass; });
}

bool VarianceReport::pass() const {
  return std::all_of(cells.begin(), cells.end(), [](const MomentCell& c) { return c.pass; });
}

ErrorSample collect_errors(const AuditSetup& setup, double delta, std::size_t delta_index, std::uint64_t trials) {
  const std::size_t n = setup.problem.dimension;
  require(setup.x.size() == n && setup.g.size() == n, "x and g must match the problem dimension");
  require(delta > 0.0, "delta must be > 0");
  ErrorSample out;
  out.delta = delta;
  out.samples = setup.sampler.samples_for(delta);
  out.current.resize(trials);
  out.trial.resize(trials);

  Vector trial_point = setup.x;
  for (std::size_t i = 0; i < n; ++i) trial_point[i] += delta * setup.g[i];
  const double f_current = setup.problem(setup.x);
  const double f_trial = setup.problem(trial_point);
  const std::uint64_t cell_seed = derive_seed(setup.seed, delta_index);

  auto work = [&](std::uint64_t begin, std::uint64_t end) {
    StochasticOracle oracle(setup.problem, setup.noise, 0);
    for (std::uint64_t t = begin; t < end; ++t) {
      oracle.reseed(derive_seed(cell_seed, t));
      const EstimatePair est = estimate_pair(oracle, setup.x, trial_point, out.samples, out.samples);
      out.current[t] = est.est_current - f_current;
      out.trial[t] = est.est_trial - f_trial;
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(setup.threads, static_cast<unsigned>(trials)));
  if (threads == 1) {
    work(0, trials);
  } else {
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (trials + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
      const std::uint64_t begin = std::min<std::uint64_t>(trials, w * chunk);
      const std::uint64_t end = std::min<std::uint64_t>(trials, begin + chunk);
      pool.emplace_back(work, begin, end);
    }
    for (auto& th : pool) th.join();
  }
  return out;
}

AuditCell tabulate(const std::vector<double>& errors, double threshold, double p, double confidence) {
  require(!errors.empty(), "no errors to tabulate");
  AuditCell cell;
  cell.p = p;
  cell.threshold = threshold;
  cell.trials = errors.size();
  cell.exceed = static_cast<std::uint64_t>(
      std::count_if(errors.begin(), errors.end(), [threshold](double e) { return std::abs(e) >= threshold; }));
  cell.freq = static_cast<double>(cell.exceed) / static_cast<double>(cell.trials);
  cell.wilson_upper = wilson_upper(cell.exceed, cell.trials, confidence);
  cell.pass = cell.wilson_upper <= p;
  return cell;
}

AuditReport score_a1(const std::vector<ErrorSample>& samples, const TailAuditSpec& spec) {
  AuditReport report{"A1", {}};
  for (const auto& s : samples) {
    const auto errors = decrease_errors(s);
    for (double p : spec.p_grid) {
      AuditCell c = tabulate(errors, spec.eps_f / p * s.delta * s.delta, p, spec.confidence);
      c.delta = s.delta;
      report.cells.push_back(c);
    }
  }
  return report;
}

AuditReport score_a2(const std::vector<ErrorSample>& samples, const TailAuditSpec& spec) {
  AuditReport report{"A2", {}};
  for (const auto& s : samples) {
    const auto errors = decrease_errors(s);
    for (double p : spec.p_grid) {
      AuditCell c = tabulate(errors, std::sqrt(spec.eps_q / p) * s.delta * s.delta, p, spec.confidence);
      c.delta = s.delta;
      report.cells.push_back(c);
    }
  }
  return report;
}

AuditReport score_generalized(const std::vector<ErrorSample>& samples, const TailAuditSpec& spec) {
  const double r = tail_order(spec.h);
  AuditReport report{"A2_generalized", {}};
  for (const auto& s : samples) {
    const auto errors = decrease_errors(s);
    for (double multiple : spec.alpha_grid) {
      const double alpha = multiple * spec.eps_q;
      if (alpha < spec.eps_q) continue;
      const double target = spec.eps_q / std::pow(alpha, r);
      AuditCell c = tabulate(errors, alpha * std::pow(s.delta, spec.h), target, spec.confidence);
      c.delta = s.delta;
      c.alpha = alpha;
      report.cells.push_back(c);
    }
  }
  return report;
}

namespace {

std::vector<ErrorSample> collect_grid(const AuditSetup& setup, const std::vector<double>& delta_grid,
                                      std::uint64_t trials) {
  std::vector<ErrorSample> out;
  for (std::size_t i = 0; i < delta_grid.size(); ++i) out.push_back(collect_errors(setup, delta_grid[i], i, trials));
  return out;
}

}  // namespace

AuditReport audit_a1(const AuditSetup& setup, const TailAuditSpec& spec) {
  spec.validate();
  return score_a1(collect_grid(setup, spec.delta_grid, spec.trials), spec);
}

AuditReport audit_a2(const AuditSetup& setup, const TailAuditSpec& spec) {
  spec.validate();
  return score_a2(collect_grid(setup, spec.delta_grid, spec.trials), spec);
}

AuditReport audit_generalized(const AuditSetup& setup, const TailAuditSpec& spec) {
  spec.validate();
  const double r = tail_order(spec.h);
  if (setup.noise.kind() != NoiseModel::Kind::None && setup.noise.declared_moment().order < r - 1e-12)
    throw InputError("tail audit: noise declares a moment of order " +
                     format_double(setup.noise.declared_moment().order) + ", below r(h) = " + format_double(r));
  return score_generalized(collect_grid(setup, spec.delta_grid, spec.trials), spec);
}

VarianceReport score_variance(const std::vector<ErrorSample>& samples, double k_f) {
  require(k_f > 0.0, "k_f must be > 0");
  VarianceReport report;
  for (const auto& s : samples) {
    for (const auto* which : {"current", "trial"}) {
      const auto& e = std::string(which) == "current" ? s.current : s.trial;
      require(e.size() >= 2, "need at least two trials");
      double mean = 0.0;
      for (double v : e) mean += v * v;
      mean /= static_cast<double>(e.size());
      double ss = 0.0;
      for (double v : e) ss += (v * v - mean) * (v * v - mean);
      const double sd = std::sqrt(ss / static_cast<double>(e.size() - 1));
      MomentCell c;
      c.delta = s.delta;
      c.which = which;
      c.samples = s.samples;
      c.second_moment = mean;
      c.std_error = sd / std::sqrt(static_cast<double>(e.size()));
      c.bound = k_f * k_f * std::pow(s.delta, 4);
      c.pass = c.second_moment <= c.bound + 3.0 * c.std_error;
      report.cells.push_back(c);
    }
  }
  return report;
}

VarianceReport audit_variance_condition(const AuditSetup& setup, double k_f, const std::vector<double>& delta_grid,
                                        std::uint64_t trials) {
  require(!delta_grid.empty(), "delta_grid must be nonempty");
  require(trials >= TailAuditSpec::kMinTrials, "trials must be >= " + std::to_string(TailAuditSpec::kMinTrials));
  return score_variance(collect_grid(setup, delta_grid, trials), k_f);
}

void write_report_csv(std::ostream& out, const AuditReport& report) {
  out << "p,delta,threshold,freq,wilson_upper,pass\n";
  for (const auto& c : report.cells)
    out << format_double(c.p) << ',' << format_double(c.delta) << ',' << format_double(c.threshold) << ','
        << format_double(c.freq) << ',' << format_double(c.wilson_upper) << ',' << (c.pass ? 1 : 0) << '\n';
}

void write_variance_csv(std::ostream& out, const VarianceReport& report) {
  out << "delta,estimate,samples,second_moment,std_error,bound,pass\n";
  for (const auto& c : report.cells)
    out << format_double(c.delta) << ',' << c.which << ',' << c.samples << ',' << format_double(c.second_moment)
        << ',' << format_double(c.std_error) << ',' << format_double(c.bound) << ',' << (c.pass ? 1 : 0) << '\n';
}

std::string to_text(const AuditReport& report) {
  std::ostringstream os;
  std::size_t passed = 0;
  for (const auto& c : report.cells) passed += c.pass ? 1 : 0;
  os << report.name << ": " << (report.pass() ? "PASS" : "FAIL") << " (" << passed << "/" << report.cells.size()
     << " cells)\n";
  char line[160];
  for (const auto& c : report.cells) {
    std::snprintf(line, sizeof line, "  p=%-8.4g delta=%-8.4g threshold=%-11.4e freq=%-10.4e upper=%-10.4e %s\n", c.p,
                  c.delta, c.threshold, c.freq, c.wilson_upper, c.pass ? "ok" : "FAIL");
    os << line;
  }
  return os.str();
}

std::string to_text(const VarianceReport& report) {
  std::ostringstream os;
  os << "variance: " << (report.pass() ? "PASS" : "FAIL") << '\n';
  char line[160];
  for (const auto& c : report.cells) {
    std::snprintf(line, sizeof line, "  delta=%-8.4g %-7s n=%-8llu moment=%-11.4e bound=%-11.4e se=%-10.3e %s\n",
                  c.delta, c.which.c_str(), static_cast<unsigned long long>(c.samples), c.second_moment, c.bound,
                  c.std_error, c.pass ? "ok" : "FAIL");
    os << line;
  }
  return os.str();
}

}  // namespace sdfo
