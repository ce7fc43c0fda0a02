#include "sdfo/direct_search.hpp"

#include <algorithm>
#include <cmath>

#include "sdfo/errors.hpp"

namespace sdfo {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw InputError("direct_search: " + what);
}

}  // namespace

void DirectSearchConfig::validate() const {
  require(delta0 > 0.0 && std::isfinite(delta0), "delta0 must be > 0");
  require(theta > 0.0 && std::isfinite(theta), "theta must be > 0");
  require(tau > 0.0 && tau < 1.0, "tau must lie in (0, 1)");
  require(tau_bar >= 1.0 && tau_bar <= 1.0 + tau, "tau_bar must lie in [1, 1 + tau]");
  require(delta_floor >= 0.0, "delta_floor must be >= 0");
  require(!eps_f_hint || *eps_f_hint >= 0.0, "eps_f_hint must be >= 0");
}

double ds_theta_bound(double eps_f, double tau) { return 4.0 * eps_f / (2.0 - tau); }

double ds_default_theta(double eps_f, double tau) { return 1.1 * ds_theta_bound(eps_f, tau); }

ThetaVerdict validate_theta(const DirectSearchConfig& cfg) {
  ThetaVerdict v;
  if (!cfg.eps_f_hint) return v;
  v.bound = ds_theta_bound(*cfg.eps_f_hint, cfg.tau);
  v.ok = cfg.theta > v.bound;
  if (!v.ok)
    v.message = "direct_search: theta = " + format_double(cfg.theta) + " does not exceed 4 eps_f / (2 - tau) = " +
                format_double(v.bound);
  return v;
}

DirectSearchStep ds_step(const DirectSearchState& state, const DirectSearchConfig& cfg, DirectionGenerator& gen,
                         StochasticOracle& oracle, const SamplerPolicy& sampler) {
  if (state.x.size() != gen.dimension()) throw InputError("direct_search: iterate and directions differ in dimension");
  const double delta = state.delta;
  Vector g = gen.next();
  Vector trial(state.x.size());
  Vector step(state.x.size());
  for (std::size_t i = 0; i < trial.size(); ++i) {
    step[i] = delta * g[i];
    trial[i] = state.x[i] + step[i];
  }

  const std::uint64_t n = sampler.samples_for(delta);
  const EstimatePair est = estimate_pair(oracle, state.x, trial, n, n);

  IterationRecord rec;
  rec.k = state.k;
  rec.delta = delta;
  rec.step_norm = delta;
  rec.f_true_current = oracle.problem()(state.x);
  rec.est_current = est.est_current;
  rec.est_trial = est.est_trial;
  rec.samples_current = est.samples_current;
  rec.samples_trial = est.samples_trial;
  rec.success = est.est_current - est.est_trial >= cfg.theta * delta * delta;
  rec.direction = std::move(g);
  rec.step = std::move(step);

  DirectSearchStep out{state, std::move(rec)};
  if (out.record.success) {
    out.state.x = std::move(trial);
    out.state.delta = cfg.tau_bar * delta;
  } else {
    out.state.delta = (1.0 - cfg.tau) * delta;
  }
  out.state.k = state.k + 1;
  out.state.cum_delta_sq = state.cum_delta_sq + delta * delta;
  return out;
}

RunResult<DirectSearchState> ds_run(const DirectSearchConfig& cfg, const Vector& x0, DirectionGenerator& gen,
                                    StochasticOracle& oracle, const SamplerPolicy& sampler) {
  cfg.validate();
  if (x0.size() != oracle.problem().dimension)
    throw InputError("direct_search: x0 has dimension " + std::to_string(x0.size()) + ", problem expects " +
                     std::to_string(oracle.problem().dimension));
  if (gen.dimension() != x0.size()) throw InputError("direct_search: direction generator has the wrong dimension");
  RunResult<DirectSearchState> run;
  run.final_state = DirectSearchState{x0, cfg.delta0, 0, 0.0};
  run.trace.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(cfg.max_iters, 1u << 20)));
  while (run.final_state.k < cfg.max_iters && !(run.final_state.delta < cfg.delta_floor)) {
    auto step = ds_step(run.final_state, cfg, gen, oracle, sampler);
    run.final_state = std::move(step.state);
    run.trace.push_back(std::move(step.record));
  }
  return run;
}

}  // namespace sdfo
