#include "sdfo/trust_region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sdfo/errors.hpp"

namespace sdfo {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw InputError("trust_region: " + what);
}

}  // namespace

void TrustRegionConfig::validate() const {
  require(delta0 > 0.0 && std::isfinite(delta0), "delta0 must be > 0");
  require(delta_max >= delta0 && std::isfinite(delta_max), "delta_max must be >= delta0");
  require(theta > 0.0 && std::isfinite(theta), "theta must be > 0");
  require(tau > 0.0 && tau < 1.0, "tau must lie in (0, 1)");
  require(tau_bar >= 1.0 && tau_bar <= 1.0 + tau, "tau_bar must lie in [1, 1 + tau]");
  require(q > 0.0 && q < 1.0, "q must lie in (0, 1)");
  require(m > 0.0 && M > 0.0, "m and M must be > 0");
  require(delta_floor >= 0.0, "delta_floor must be >= 0");
  require(!eps_f_hint || *eps_f_hint >= 0.0, "eps_f_hint must be >= 0");
}

double tr_m_bar(double M, double delta_max, double q) { return 1.0 / (M * M * std::pow(delta_max, 2.0 - 2.0 * q)); }

double tr_theta_bound(double eps_f, double tau, double M, double delta_max, double q) {
  const double m_bar = std::min(1.0, tr_m_bar(M, delta_max, q));
  return 4.0 * eps_f / (m_bar * (2.0 - tau));
}

ThetaVerdict validate_theta_tr(const TrustRegionConfig& cfg) {
  ThetaVerdict v;
  if (!cfg.eps_f_hint) return v;
  v.bound = tr_theta_bound(*cfg.eps_f_hint, cfg.tau, cfg.M, cfg.delta_max, cfg.q);
  v.ok = cfg.theta > v.bound;
  if (!v.ok)
    v.message = "trust_region: theta = " + format_double(cfg.theta) +
                " does not exceed 4 eps_f / (min(1, M_bar) (2 - tau)) = " + format_double(v.bound);
  return v;
}

Matrix clip_eigenvalues(const Matrix& b, double lo, double hi) {
  constexpr double kMargin = 1.0 - 1e-10;
  SymmetricEigen eig = symmetric_eigen(b);
  for (double& v : eig.values) v = std::clamp(v, lo * kMargin, hi * kMargin);
  return reconstruct(eig.vectors, eig.values);
}

ModelBuild build_model(const TrustRegionState& state, const TrustRegionConfig& cfg, DirectionGenerator& gen,
                       StochasticOracle& oracle, const SamplerPolicy& sampler) {
  const std::size_t n = state.x.size();
  ModelBuild out;
  out.model.g = gen.next();
  out.model.radius = state.delta;
  out.model.B = Matrix(n, n, 0.0);
  if (cfg.hessian == HessianPolicy::Zero) return out;

  const double h = state.delta;
  const std::uint64_t per_point = sampler.samples_for(h);
  auto estimate = [&](const Vector& p) {
    out.samples += per_point;
    return sample_estimate(oracle, p, per_point);
  };
  const double f0 = estimate(state.x);
  Vector plus(n);
  Vector minus(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vector p = state.x;
    p[i] += h;
    plus[i] = estimate(p);
    p[i] = state.x[i] - h;
    minus[i] = estimate(p);
  }
  Matrix b(n, n);
  const double inv_h2 = 1.0 / (h * h);
  for (std::size_t i = 0; i < n; ++i) {
    b(i, i) = (plus[i] - 2.0 * f0 + minus[i]) * inv_h2;
    for (std::size_t j = i + 1; j < n; ++j) {
      Vector p = state.x;
      p[i] += h;
      p[j] += h;
      const double v = (estimate(p) - plus[i] - plus[j] + f0) * inv_h2;
      b(i, j) = v;
      b(j, i) = v;
    }
  }
  const double growth = std::pow(h, -cfg.q);
  out.model.B = clip_eigenvalues(b, -cfg.m * growth, cfg.M * growth);
  return out;
}

double rho(double est_current, double est_trial, double theta, double step_norm) {
  if (step_norm == 0.0) throw DegenerateStepError("rho: zero step");
  return (est_current - est_trial) / (theta * step_norm * step_norm);
}

TrustRegionStep tr_step(const TrustRegionState& state, const TrustRegionConfig& cfg, DirectionGenerator& gen,
                        StochasticOracle& oracle, const SamplerPolicy& sampler) {
  if (state.x.size() != gen.dimension()) throw InputError("trust_region: iterate and directions differ in dimension");
  const double delta = state.delta;
  ModelBuild built = build_model(state, cfg, gen, oracle, sampler);
  const SubproblemSolution sol = solve_exact(built.model);
  const double step_norm = norm2(sol.s);

  IterationRecord rec;
  rec.k = state.k;
  rec.delta = delta;
  rec.step_norm = step_norm;
  rec.f_true_current = oracle.problem()(state.x);
  rec.samples_model = built.samples;
  rec.on_boundary = sol.on_boundary;
  rec.direction = std::move(built.model.g);
  rec.step = sol.s;

  Vector trial = state.x;
  if (step_norm == 0.0) {
    // rho is undefined; contract without spending samples.
    rec.est_current = std::numeric_limits<double>::quiet_NaN();
    rec.est_trial = std::numeric_limits<double>::quiet_NaN();
    rec.success = false;
  } else {
    for (std::size_t i = 0; i < trial.size(); ++i) trial[i] += sol.s[i];
    const std::uint64_t n = sampler.samples_for(step_norm);
    const EstimatePair est = estimate_pair(oracle, state.x, trial, n, n);
    rec.est_current = est.est_current;
    rec.est_trial = est.est_trial;
    rec.samples_current = est.samples_current;
    rec.samples_trial = est.samples_trial;
    rec.success = rho(est.est_current, est.est_trial, cfg.theta, step_norm) >= 1.0;
  }

  TrustRegionStep out{state, std::move(rec)};
  if (out.record.success) {
    out.state.x = std::move(trial);
    out.state.delta = std::min(cfg.delta_max, cfg.tau_bar * delta);
  } else {
    out.state.delta = (1.0 - cfg.tau) * delta;
  }
  out.state.k = state.k + 1;
  out.state.cum_delta_sq = state.cum_delta_sq + delta * delta;
  return out;
}

RunResult<TrustRegionState> tr_run(const TrustRegionConfig& cfg, const Vector& x0, DirectionGenerator& gen,
                                   StochasticOracle& oracle, const SamplerPolicy& sampler) {
  cfg.validate();
  if (x0.size() != oracle.problem().dimension)
    throw InputError("trust_region: x0 has dimension " + std::to_string(x0.size()) + ", problem expects " +
                     std::to_string(oracle.problem().dimension));
  if (gen.dimension() != x0.size()) throw InputError("trust_region: direction generator has the wrong dimension");
  RunResult<TrustRegionState> run;
  run.final_state = TrustRegionState{x0, cfg.delta0, 0, 0.0};
  while (run.final_state.k < cfg.max_iters && !(run.final_state.delta < cfg.delta_floor)) {
    auto step = tr_step(run.final_state, cfg, gen, oracle, sampler);
    run.final_state = std::move(step.state);
    run.trace.push_back(std::move(step.record));
  }
  return run;
}

}  // namespace sdfo
