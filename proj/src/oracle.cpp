#include "sdfo/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <type_traits>

#include "sdfo/errors.hpp"

namespace sdfo {

namespace {

constexpr double kSaturation = 4611686018427387904.0;  // 2^62

std::uint64_t ceil_count(double value) {
  if (!(value < kSaturation)) return static_cast<std::uint64_t>(kSaturation);
  const double c = std::ceil(value);
  return c < 1.0 ? 1 : static_cast<std::uint64_t>(c);
}

// E|T_nu|^r for r < nu.
double student_abs_moment(double nu, double r) {
  return std::pow(nu, r / 2.0) * std::tgamma((r + 1.0) / 2.0) * std::tgamma((nu - r) / 2.0) /
         (std::sqrt(std::numbers::pi) * std::tgamma(nu / 2.0));
}

}  // namespace

double TestProblem::operator()(std::span<const double> x) const {
  if (x.size() != dimension)
    throw InputError("problem '" + name + "': point has dimension " + std::to_string(x.size()) + ", expected " +
                     std::to_string(dimension));
  return eval_true(x);
}

NoiseModel NoiseModel::none() { return NoiseModel{}; }

NoiseModel NoiseModel::gaussian(double variance) {
  if (!(variance > 0.0) || !std::isfinite(variance)) throw InputError("gaussian noise: variance must be > 0");
  NoiseModel m;
  m.kind_ = Kind::Gaussian;
  m.variance_ = variance;
  m.declared_variance_ = variance;
  m.declared_moment_ = {2.0, variance};
  return m;
}

NoiseModel NoiseModel::student_t(double nu, double scale, std::optional<double> moment_order) {
  if (!(nu > 0.0) || !(scale > 0.0)) throw InputError("student_t noise: nu and scale must be > 0");
  NoiseModel m;
  m.kind_ = Kind::StudentT;
  m.nu_ = nu;
  m.scale_ = scale;
  double r = moment_order.value_or(2.0);
  if (nu > 2.0) {
    m.declared_variance_ = scale * scale * nu / (nu - 2.0);
    if (!moment_order) {
      m.declared_moment_ = {2.0, *m.declared_variance_};
      return m;
    }
  } else if (!moment_order) {
    throw InputError("student_t noise with nu <= 2 has infinite variance: declare a moment order in (1, 2]");
  }
  if (!(r > 1.0 && r <= 2.0)) throw InputError("student_t noise: moment order must lie in (1, 2]");
  if (!(r < nu)) throw InputError("student_t noise: moment order must be below nu");
  m.declared_moment_ = {r, std::pow(scale, r) * student_abs_moment(nu, r)};
  return m;
}

NoiseModel NoiseModel::pareto_symmetric(double r, double scale) {
  if (!(r > 1.0 && r <= 2.0)) throw InputError("pareto_symmetric noise: tail index r must lie in (1, 2]");
  if (!(scale > 0.0)) throw InputError("pareto_symmetric noise: scale must be > 0");
  NoiseModel m;
  m.kind_ = Kind::ParetoSymmetric;
  m.tail_index_ = r;
  m.scale_ = scale;
  const double alpha = r + 0.5;
  const double mean = alpha / (alpha - 1.0);
  if (alpha > 2.0) m.declared_variance_ = scale * scale * alpha / ((alpha - 1.0) * (alpha - 1.0) * (alpha - 2.0));
  // Minkowski: ||P - mu||_r <= ||P||_r + mu, with E[P^r] = alpha / (alpha - r).
  const double norm_r = std::pow(alpha / (alpha - r), 1.0 / r) + mean;
  m.declared_moment_ = {r, std::pow(scale * norm_r, r)};
  return m;
}

std::string to_string(NoiseModel::Kind kind) {
  switch (kind) {
    case NoiseModel::Kind::None: return "none";
    case NoiseModel::Kind::Gaussian: return "gaussian";
    case NoiseModel::Kind::StudentT: return "student_t";
    case NoiseModel::Kind::ParetoSymmetric: return "pareto_symmetric";
  }
  return "unknown";
}

StochasticOracle::StochasticOracle(TestProblem problem, NoiseModel noise, std::uint64_t seed)
    : problem_(std::move(problem)), noise_(noise), engine_(seed) {
  if (!problem_.eval_true) throw InputError("oracle: problem has no objective");
  if (noise_.kind() == NoiseModel::Kind::StudentT)
    student_ = std::student_t_distribution<double>(noise_.nu());
}

void StochasticOracle::reseed(std::uint64_t seed) {
  engine_.seed(seed);
  normal_.reset();
  student_.reset();
  uniform_.reset();
  draws_ = 0;
}

double StochasticOracle::noise_draw() {
  ++draws_;
  switch (noise_.kind()) {
    case NoiseModel::Kind::None:
      return 0.0;
    case NoiseModel::Kind::Gaussian:
      return std::sqrt(noise_.variance_param()) * normal_(engine_);
    case NoiseModel::Kind::StudentT:
      return noise_.scale() * student_(engine_);
    case NoiseModel::Kind::ParetoSymmetric: {
      const double alpha = noise_.tail_index() + 0.5;
      const double u = 1.0 - uniform_(engine_);  // (0, 1]
      const double p = std::pow(u, -1.0 / alpha);
      const double sign = uniform_(engine_) < 0.5 ? -1.0 : 1.0;
      return noise_.scale() * sign * (p - alpha / (alpha - 1.0));
    }
  }
  return 0.0;
}

double StochasticOracle::raw_sample(std::span<const double> x) { return problem_(x) + noise_draw(); }

double sample_estimate(StochasticOracle& oracle, std::span<const double> x, std::uint64_t n) {
  if (n == 0) throw InputError("sample_estimate: need at least one sample");
  const double fx = oracle.problem()(x);
  // f(x) + mean(noise) rather than mean(f(x) + noise): identical in law, and
  // exact when the oracle is noiseless.
  double sum = 0.0;
  for (std::uint64_t i = 0; i < n; ++i) sum += oracle.noise_draw();
  return fx + sum / static_cast<double>(n);
}

EstimatePair estimate_pair(StochasticOracle& oracle, std::span<const double> x_current,
                           std::span<const double> x_trial, std::uint64_t n_current, std::uint64_t n_trial) {
  EstimatePair out;
  out.est_current = sample_estimate(oracle, x_current, n_current);
  out.est_trial = sample_estimate(oracle, x_trial, n_trial);
  out.samples_current = n_current;
  out.samples_trial = n_trial;
  return out;
}

std::uint64_t required_samples(double variance, double k_f, double delta) {
  if (!(variance > 0.0) || !(k_f > 0.0) || !(delta > 0.0))
    throw InputError("required_samples: V, k_f and delta must be > 0");
  const double d2 = delta * delta;
  return ceil_count(variance / (k_f * k_f * d2 * d2));
}

double tail_order(double h) {
  if (!(h >= 2.0)) throw InputError("tail exponent h must be >= 2");
  return 2.0 / (h - 1.0);
}

std::uint64_t moment_oracle_samples(double bound, double r, double delta, double h, double eps_q) {
  if (!(bound > 0.0) || !(delta > 0.0) || !(eps_q > 0.0))
    throw InputError("moment_oracle_samples: bound, delta and eps_q must be > 0");
  if (!(r > 1.0 && r <= 2.0)) throw InputError("moment_oracle_samples: moment order r must lie in (1, 2]");
  const double rh = tail_order(h);
  if (r < rh - 1e-12)
    throw InputError("moment_oracle_samples: moment order r = " + std::to_string(r) + " is below r(h) = " +
                     std::to_string(rh));
  constexpr double kVonBahrEsseen = 2.0;
  // Two independent means: the decrease error is a sum of 2n scaled draws.
  const double numerator = 2.0 * kVonBahrEsseen * bound;
  const double denominator = std::pow(eps_q, 1.0 + std::max(0.0, r - rh)) * std::pow(delta, h * r);
  return ceil_count(std::pow(numerator / denominator, 1.0 / (r - 1.0)));
}

SamplerPolicy::SamplerPolicy(Rule rule, std::uint64_t max_samples) : rule_(rule), max_samples_(max_samples) {
  if (max_samples_ == 0) throw InputError("sampler: max_samples must be >= 1");
  if (const auto* f = std::get_if<Fixed>(&rule_); f && f->n == 0)
    throw InputError("sampler: fixed sample count must be >= 1");
  if (const auto* v = std::get_if<VarianceRule>(&rule_); v && !(v->variance > 0.0 && v->k_f > 0.0))
    throw InputError("sampler: variance rule needs variance > 0 and k_f > 0");
  if (const auto* m = std::get_if<MomentRule>(&rule_)) {
    // Validates r, h, bound and eps_q.
    (void)moment_oracle_samples(m->bound, m->r, 1.0, m->h, m->eps_q);
  }
}

std::uint64_t SamplerPolicy::samples_for(double delta) const {
  const std::uint64_t n = std::visit(
      [delta](const auto& rule) -> std::uint64_t {
        using T = std::decay_t<decltype(rule)>;
        if constexpr (std::is_same_v<T, Fixed>) {
          return rule.n;
        } else if constexpr (std::is_same_v<T, VarianceRule>) {
          return required_samples(rule.variance, rule.k_f, delta);
        } else {
          return moment_oracle_samples(rule.bound, rule.r, delta, rule.h, rule.eps_q);
        }
      },
      rule_);
  return std::min(n, max_samples_);
}

}  // namespace sdfo
