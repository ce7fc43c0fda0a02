#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "sdfo/linalg.hpp"

namespace sdfo {

/// Deterministic benchmark objective with known optimal value.
struct TestProblem {
  std::string name;
  std::size_t dimension = 0;
  std::function<double(std::span<const double>)> eval_true;
  double optimum_value = 0.0;
  std::optional<double> lipschitz_hint;
  /// Known Clarke-stationary points; empty when the set is not known.
  std::vector<Vector> stationary_points;
  Vector default_start;

  double operator()(std::span<const double> x) const;
};

/// Finite absolute moment E|noise|^order <= bound.
struct MomentBound {
  double order = 2.0;
  double bound = 0.0;
  bool operator==(const MomentBound&) const = default;
};

/// Zero-mean additive noise law of a stochastic oracle.
class NoiseModel {
 public:
  enum class Kind { None, Gaussian, StudentT, ParetoSymmetric };

  static NoiseModel none();
  static NoiseModel gaussian(double variance);
  /// scale * T_nu. For nu <= 2 the variance is infinite and `moment_order`
  /// (in (1,2], below nu) selects the declared finite moment.
  static NoiseModel student_t(double nu, double scale, std::optional<double> moment_order = {});
  /// scale * sign * (P - E[P]) with P ~ Pareto(x_m = 1, alpha = r + 0.5):
  /// the r-th absolute moment is finite, the variance is not when r <= 1.5.
  static NoiseModel pareto_symmetric(double r, double scale);

  Kind kind() const { return kind_; }
  double variance_param() const { return variance_; }
  double nu() const { return nu_; }
  double scale() const { return scale_; }
  double tail_index() const { return tail_index_; }

  std::optional<double> declared_variance() const { return declared_variance_; }
  MomentBound declared_moment() const { return declared_moment_; }

  bool operator==(const NoiseModel&) const = default;

 private:
  Kind kind_ = Kind::None;
  double variance_ = 0.0;
  double nu_ = 0.0;
  double scale_ = 0.0;
  double tail_index_ = 0.0;
  std::optional<double> declared_variance_;
  MomentBound declared_moment_{2.0, 0.0};
};

std::string to_string(NoiseModel::Kind kind);

/// Source of F(x, xi) = f(x) + noise. Owns its random stream: two oracles
/// built with the same seed produce the same sample sequence.
class StochasticOracle {
 public:
  StochasticOracle(TestProblem problem, NoiseModel noise, std::uint64_t seed);

  const TestProblem& problem() const { return problem_; }
  const NoiseModel& noise() const { return noise_; }
  std::uint64_t draws() const { return draws_; }

  /// Restart the stream from a new seed.
  void reseed(std::uint64_t seed);

  double noise_draw();
  double raw_sample(std::span<const double> x);

 private:
  TestProblem problem_;
  NoiseModel noise_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::student_t_distribution<double> student_{1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::uint64_t draws_ = 0;
};

struct EstimatePair {
  double est_current = 0.0;
  double est_trial = 0.0;
  std::uint64_t samples_current = 1;
  std::uint64_t samples_trial = 1;
};

/// Mean of n raw samples at x; advances the stream by exactly n draws.
double sample_estimate(StochasticOracle& oracle, std::span<const double> x, std::uint64_t n);

/// Estimates at x_current then x_trial from consecutive, disjoint segments
/// of the stream, so the two means are independent.
EstimatePair estimate_pair(StochasticOracle& oracle, std::span<const double> x_current,
                           std::span<const double> x_trial, std::uint64_t n_current, std::uint64_t n_trial);

/// max(1, ceil(V / (k_f^2 delta^4))): enough samples of a variance-V oracle
/// for E|f_k - f(x_k)|^2 <= k_f^2 delta^4. Saturates at 2^62.
std::uint64_t required_samples(double variance, double k_f, double delta);

/// Tail order r(h) = 2 / (h - 1).
double tail_order(double h);

/// Sample count that makes the decrease-estimate error satisfy
/// P(|err| >= alpha delta^h) <= eps_q / alpha^r(h) for all alpha >= eps_q,
/// given an oracle with E|noise|^r <= bound, r in (1,2], r >= r(h):
///   n = ceil((2 C_r bound / (eps_q^(1 + r - r(h)) delta^(h r)))^(1/(r-1))),  C_r = 2.
/// With h = r = 2 and eps_q = 4 k_f^2 this is exactly required_samples.
std::uint64_t moment_oracle_samples(double bound, double r, double delta, double h, double eps_q);

/// How many samples an estimate at radius `delta` gets.
class SamplerPolicy {
 public:
  struct Fixed {
    std::uint64_t n = 1;
    bool operator==(const Fixed&) const = default;
  };
  struct VarianceRule {
    double variance = 1.0;
    double k_f = 1.0;
    bool operator==(const VarianceRule&) const = default;
  };
  struct MomentRule {
    double bound = 1.0;
    double r = 2.0;
    double h = 2.0;
    double eps_q = 4.0;
    bool operator==(const MomentRule&) const = default;
  };
  using Rule = std::variant<Fixed, VarianceRule, MomentRule>;

  static constexpr std::uint64_t kDefaultMaxSamples = 1'000'000;

  SamplerPolicy() = default;
  explicit SamplerPolicy(Rule rule, std::uint64_t max_samples = kDefaultMaxSamples);

  static SamplerPolicy fixed(std::uint64_t n) { return SamplerPolicy(Fixed{n}); }
  static SamplerPolicy variance_rule(double variance, double k_f,
                                     std::uint64_t max_samples = kDefaultMaxSamples) {
    return SamplerPolicy(VarianceRule{variance, k_f}, max_samples);
  }
  static SamplerPolicy moment_rule(double bound, double r, double h, double eps_q,
                                   std::uint64_t max_samples = kDefaultMaxSamples) {
    return SamplerPolicy(MomentRule{bound, r, h, eps_q}, max_samples);
  }

  const Rule& rule() const { return rule_; }
  std::uint64_t max_samples() const { return max_samples_; }
  std::uint64_t samples_for(double delta) const;

  bool operator==(const SamplerPolicy&) const = default;

 private:
  Rule rule_ = Fixed{1};
  std::uint64_t max_samples_ = kDefaultMaxSamples;
};

}  // namespace sdfo
