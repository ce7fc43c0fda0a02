#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "sdfo/oracle.hpp"
#include "sdfo/sphere_directions.hpp"
#include "sdfo/trace.hpp"

namespace sdfo {

struct DirectSearchConfig {
  double delta0 = 1.0;
  double theta = 1.0;
  double tau = 0.5;
  double tau_bar = 1.0;  // in [1, 1 + tau]
  std::uint64_t max_iters = 1000;
  /// Stop once delta drops below this; 0 disables the floor.
  double delta_floor = 1e-8;
  std::optional<double> eps_f_hint;

  /// Throws InputError naming the offending field.
  void validate() const;
  bool operator==(const DirectSearchConfig&) const = default;
};

struct DirectSearchState {
  Vector x;
  double delta = 1.0;
  std::uint64_t k = 0;
  double cum_delta_sq = 0.0;
};

/// Advisory check of the sufficient-decrease constant. `bound` is the
/// smallest admissible theta (exclusive); 0 when no eps_f is known.
struct ThetaVerdict {
  bool ok = true;
  double bound = 0.0;
  std::string message;
};

/// theta > 4 eps_f / (2 - tau).
double ds_theta_bound(double eps_f, double tau);
ThetaVerdict validate_theta(const DirectSearchConfig& cfg);
/// 1.1 times the bound: the default theta when only eps_f is given.
double ds_default_theta(double eps_f, double tau);

struct DirectSearchStep {
  DirectSearchState state;
  IterationRecord record;
};

/// One iteration: draw g_k, estimate f at x_k and x_k + delta_k g_k with
/// sampler.samples_for(delta_k) samples each, accept iff
/// est_current - est_trial >= theta delta_k^2.
DirectSearchStep ds_step(const DirectSearchState& state, const DirectSearchConfig& cfg, DirectionGenerator& gen,
                         StochasticOracle& oracle, const SamplerPolicy& sampler);

template <class State>
struct RunResult {
  State final_state;
  Trace trace;
};

/// Iterates until max_iters or delta < delta_floor.
RunResult<DirectSearchState> ds_run(const DirectSearchConfig& cfg, const Vector& x0, DirectionGenerator& gen,
                                    StochasticOracle& oracle, const SamplerPolicy& sampler);

}  // namespace sdfo
