#pragma once

#include <cstdint>
#include <optional>

#include "sdfo/direct_search.hpp"
#include "sdfo/tr_subproblem.hpp"

namespace sdfo {

enum class HessianPolicy { Zero, RegressionClipped };

struct TrustRegionConfig {
  double delta0 = 1.0;
  double delta_max = 1.0;
  double theta = 1.0;
  double tau = 0.5;
  double tau_bar = 1.0;
  HessianPolicy hessian = HessianPolicy::Zero;
  // Eigenvalue growth bounds: -m delta^-q <= eig(B) <= M delta^-q.
  double q = 0.5;
  double m = 1.0;
  double M = 1.0;
  std::uint64_t max_iters = 1000;
  double delta_floor = 1e-8;
  std::optional<double> eps_f_hint;

  void validate() const;
  bool operator==(const TrustRegionConfig&) const = default;
};

using TrustRegionState = DirectSearchState;

/// 1 / (M^2 delta_max^(2 - 2q)).
double tr_m_bar(double M, double delta_max, double q);
/// theta > 4 eps_f / (min(1, M_bar) (2 - tau)).
double tr_theta_bound(double eps_f, double tau, double M, double delta_max, double q);
ThetaVerdict validate_theta_tr(const TrustRegionConfig& cfg);

struct ModelBuild {
  QuadraticModel model;
  std::uint64_t samples = 0;
};

/// Draws g_k and forms B_k. RegressionClipped estimates f at x, x +- delta e_i
/// and x + delta (e_i + e_j), takes second differences, then clips the
/// eigenvalues into [-m delta^-q, M delta^-q].
ModelBuild build_model(const TrustRegionState& state, const TrustRegionConfig& cfg, DirectionGenerator& gen,
                       StochasticOracle& oracle, const SamplerPolicy& sampler);

/// Eigenvalues of b clipped into [lo, hi] (slightly inside, so the bound
/// survives reconstruction roundoff).
Matrix clip_eigenvalues(const Matrix& b, double lo, double hi);

/// (est_current - est_trial) / (theta ||s||^2). Throws DegenerateStepError
/// when step_norm is 0.
double rho(double est_current, double est_trial, double theta, double step_norm);

struct TrustRegionStep {
  TrustRegionState state;
  IterationRecord record;
};

TrustRegionStep tr_step(const TrustRegionState& state, const TrustRegionConfig& cfg, DirectionGenerator& gen,
                        StochasticOracle& oracle, const SamplerPolicy& sampler);

RunResult<TrustRegionState> tr_run(const TrustRegionConfig& cfg, const Vector& x0, DirectionGenerator& gen,
                                   StochasticOracle& oracle, const SamplerPolicy& sampler);

}  // namespace sdfo
