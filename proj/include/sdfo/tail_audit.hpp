#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sdfo/oracle.hpp"

namespace sdfo {

/// Upper end of the two-sided Wilson score interval for a binomial
/// proportion (successes out of trials) at the given confidence.
double wilson_upper(std::uint64_t successes, std::uint64_t trials, double confidence);
double wilson_lower(std::uint64_t successes, std::uint64_t trials, double confidence);

struct TailAuditSpec {
  double eps_f = 2.0;
  double eps_q = 4.0;
  std::vector<double> p_grid = {0.5, 0.25, 0.1, 0.05};
  std::vector<double> delta_grid = {1.0, 0.5, 0.25};
  std::uint64_t trials = 100'000;
  double confidence = 0.99;
  // Generalized condition: thresholds alpha delta^h with target eps_q / alpha^r(h).
  double h = 2.0;
  /// Multiples of eps_q; cells with alpha < eps_q are dropped.
  std::vector<double> alpha_grid = {1.0, 2.0, 4.0, 8.0, 16.0};

  static constexpr std::uint64_t kMinTrials = 1000;
  /// Throws InputError naming the field.
  void validate() const;
  bool operator==(const TailAuditSpec&) const = default;
};

/// What is being audited: an oracle (problem + noise), the point and
/// direction the decrease is measured along, and the sample-count rule.
struct AuditSetup {
  TestProblem problem;
  NoiseModel noise;
  Vector x;
  Vector g;
  SamplerPolicy sampler;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// Estimation errors of `trials` independent estimate pairs at (x, x + delta g).
struct ErrorSample {
  double delta = 0.0;
  std::uint64_t samples = 0;  // per estimate
  std::vector<double> current;  // f_k - f(x)
  std::vector<double> trial;    // f_k^g - f(x + delta g)

  /// (f_k - f_k^g) - (f(x) - f(x + delta g)) for trial t.
  double decrease_error(std::size_t t) const { return current[t] - trial[t]; }
};

/// Trial t of the cell with index `delta_index` draws from the substream
/// derive_seed(derive_seed(seed, delta_index), t), so results do not depend
/// on the thread count.
ErrorSample collect_errors(const AuditSetup& setup, double delta, std::size_t delta_index, std::uint64_t trials);

struct AuditCell {
  double p = 0.0;  // target probability
  double delta = 0.0;
  double threshold = 0.0;
  double alpha = 0.0;  // generalized audit only
  std::uint64_t exceed = 0;
  std::uint64_t trials = 0;
  double freq = 0.0;
  double wilson_upper = 0.0;
  bool pass = false;

  bool operator==(const AuditCell&) const = default;
};

struct AuditReport {
  std::string name;
  std::vector<AuditCell> cells;
  bool pass() const;
  bool operator==(const AuditReport&) const = default;
};

/// Counts |errors[t]| >= threshold and scores the cell against target p.
AuditCell tabulate(const std::vector<double>& errors, double threshold, double p, double confidence);

/// P(|decrease error| >= (eps_f / p) delta^2) <= p.
AuditReport audit_a1(const AuditSetup& setup, const TailAuditSpec& spec);
/// P(|decrease error| >= sqrt(eps_q / p) delta^2) <= p.
AuditReport audit_a2(const AuditSetup& setup, const TailAuditSpec& spec);
/// P(|decrease error| >= alpha delta^h) <= eps_q / alpha^r(h) for alpha >= eps_q.
/// Throws InputError if the noise's declared moment order is below r(h).
AuditReport audit_generalized(const AuditSetup& setup, const TailAuditSpec& spec);

/// The same three audits from already collected errors (one sample per delta).
AuditReport score_a1(const std::vector<ErrorSample>& samples, const TailAuditSpec& spec);
AuditReport score_a2(const std::vector<ErrorSample>& samples, const TailAuditSpec& spec);
AuditReport score_generalized(const std::vector<ErrorSample>& samples, const TailAuditSpec& spec);

struct MomentCell {
  double delta = 0.0;
  std::string which;  // "current" or "trial"
  std::uint64_t samples = 0;
  double second_moment = 0.0;
  double std_error = 0.0;
  double bound = 0.0;  // k_f^2 delta^4
  bool pass = false;
};

struct VarianceReport {
  std::vector<MomentCell> cells;
  bool pass() const;
};

/// E|f_k - f(x_k)|^2 <= k_f^2 delta^4, per estimate: passes when the
/// empirical moment is within three standard errors of the bound.
VarianceReport audit_variance_condition(const AuditSetup& setup, double k_f, const std::vector<double>& delta_grid,
                                        std::uint64_t trials);
VarianceReport score_variance(const std::vector<ErrorSample>& samples, double k_f);

void write_report_csv(std::ostream& out, const AuditReport& report);
void write_variance_csv(std::ostream& out, const VarianceReport& report);
std::string to_text(const AuditReport& report);
std::string to_text(const VarianceReport& report);

}  // namespace sdfo
