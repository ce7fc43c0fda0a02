#include <catch_amalgamated.hpp>

#include <cmath>

#include "sdfo/diagnostics.hpp"
#include "sdfo/direct_search.hpp"
#include "sdfo/errors.hpp"
#include "sdfo/problems.hpp"

using namespace sdfo;
using Catch::Approx;

namespace {

TestProblem square_1d() {
  TestProblem p;
  p.name = "square";
  p.dimension = 1;
  p.eval_true = [](std::span<const double> x) { return x[0] * x[0]; };
  p.stationary_points = {{0.0}};
  return p;
}

DirectSearchConfig config(double theta, double tau, double tau_bar) {
  DirectSearchConfig c;
  c.theta = theta;
  c.tau = tau;
  c.tau_bar = tau_bar;
  return c;
}

// Plain deterministic direct search: one direction per iteration, sufficient
// decrease theta delta^2, expand by tau_bar, contract by 1 - tau.
struct Reference {
  std::vector<Vector> xs;
  std::vector<double> deltas;
  std::vector<bool> success;
};

Reference reference_run(const TestProblem& f, Vector x, double delta, const DirectSearchConfig& c,
                        DirectionGenerator gen, int iters) {
  Reference ref;
  for (int k = 0; k < iters; ++k) {
    const Vector g = gen.next();
    Vector y = x;
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = x[i] + delta * g[i];
    const bool ok = f(x) - f(y) >= c.theta * delta * delta;
    ref.xs.push_back(x);
    ref.deltas.push_back(delta);
    ref.success.push_back(ok);
    if (ok) {
      x = y;
      delta *= c.tau_bar;
    } else {
      delta *= 1.0 - c.tau;
    }
  }
  ref.xs.push_back(x);
  ref.deltas.push_back(delta);
  return ref;
}

}  // namespace

TEST_CASE("validate_theta examples") {
  auto c = config(5.0, 0.5, 1.0);
  c.eps_f_hint = 1.0;
  auto v = validate_theta(c);
  CHECK(v.ok);
  CHECK(v.bound == Approx(8.0 / 3.0));

  c.theta = 2.0;
  v = validate_theta(c);
  CHECK_FALSE(v.ok);
  CHECK(v.bound == Approx(8.0 / 3.0));
  CHECK_FALSE(v.message.empty());

  c.eps_f_hint = 0.0;
  CHECK(validate_theta(c).ok);
  c.eps_f_hint.reset();
  CHECK(validate_theta(c).ok);
  CHECK(ds_default_theta(1.0, 0.5) == Approx(1.1 * 8.0 / 3.0));
}

TEST_CASE("ds_step examples") {
  StochasticOracle oracle(square_1d(), NoiseModel::none(), 0);
  const auto sampler = SamplerPolicy::fixed(1);

  SECTION("successful step at x = 1 along g = -1") {
    auto c = config(0.5, 0.5, 1.25);
    auto gen = DirectionGenerator::fixed_cycle({{-1.0}});
    const auto out = ds_step(DirectSearchState{{1.0}, 1.0, 0, 0.0}, c, gen, oracle, sampler);
    CHECK(out.record.success);
    CHECK(out.state.x == Vector{0.0});
    CHECK(out.state.delta == 1.25);
    CHECK(out.state.k == 1);
    CHECK(out.state.cum_delta_sq == 1.0);
    CHECK(out.record.est_current == 1.0);
    CHECK(out.record.est_trial == 0.0);
  }
  SECTION("unsuccessful step at the minimizer") {
    auto c = config(0.5, 0.5, 1.25);
    for (double g : {-1.0, 1.0}) {
      auto gen = DirectionGenerator::fixed_cycle({{g}});
      const auto out = ds_step(DirectSearchState{{0.0}, 1.0, 0, 0.0}, c, gen, oracle, sampler);
      CHECK_FALSE(out.record.success);
      CHECK(out.state.x == Vector{0.0});
      CHECK(out.state.delta == 0.5);
    }
  }
  SECTION("contraction from 0.8 with tau = 0.5") {
    auto c = config(0.5, 0.5, 1.25);
    auto gen = DirectionGenerator::fixed_cycle({{1.0}});
    const auto out = ds_step(DirectSearchState{{0.0}, 0.8, 0, 0.0}, c, gen, oracle, sampler);
    CHECK_FALSE(out.record.success);
    CHECK(out.state.delta == 0.4);
  }
  SECTION("a tie counts as success") {
    // f(1) - f(0) = 1 = theta delta^2.
    auto c = config(1.0, 0.5, 1.0);
    auto gen = DirectionGenerator::fixed_cycle({{-1.0}});
    const auto out = ds_step(DirectSearchState{{1.0}, 1.0, 0, 0.0}, c, gen, oracle, sampler);
    CHECK(out.record.success);
  }
}

TEST_CASE("configuration invariants are checked before the first step") {
  const auto p = ProblemRegistry::make("sphere", 2);
  StochasticOracle oracle(p, NoiseModel::none(), 0);
  auto gen = DirectionGenerator::quasi_random(2);
  const auto sampler = SamplerPolicy::fixed(1);
  CHECK_THROWS_AS(ds_run(config(1.0, 1.0, 1.0), p.default_start, gen, oracle, sampler), InputError);
  CHECK_THROWS_AS(ds_run(config(1.0, 0.5, 1.6), p.default_start, gen, oracle, sampler), InputError);
  CHECK_THROWS_AS(ds_run(config(1.0, 0.5, 0.9), p.default_start, gen, oracle, sampler), InputError);
  CHECK_THROWS_AS(ds_run(config(0.0, 0.5, 1.0), p.default_start, gen, oracle, sampler), InputError);
  auto c = config(1.0, 0.5, 1.0);
  c.delta0 = -1.0;
  CHECK_THROWS_AS(ds_run(c, p.default_start, gen, oracle, sampler), InputError);
  CHECK_THROWS_AS(ds_run(config(1.0, 0.5, 1.0), Vector{1.0}, gen, oracle, sampler), InputError);
  CHECK(gen.cursor() == 0);
  CHECK(oracle.draws() == 0);
}

TEST_CASE("zero iterations leave the state untouched") {
  const auto p = ProblemRegistry::make("sphere", 2);
  StochasticOracle oracle(p, NoiseModel::gaussian(1.0), 0);
  auto gen = DirectionGenerator::quasi_random(2);
  auto c = config(1.0, 0.5, 1.0);
  c.max_iters = 0;
  const auto run = ds_run(c, p.default_start, gen, oracle, SamplerPolicy::fixed(1));
  CHECK(run.trace.empty());
  CHECK(run.final_state.x == p.default_start);
  CHECK(run.final_state.delta == c.delta0);
  CHECK(run.final_state.k == 0);
  CHECK(run.final_state.cum_delta_sq == 0.0);
}

TEST_CASE("zero noise matches a deterministic reference on l1norm") {
  const auto p = ProblemRegistry::make("l1norm", 2);
  auto c = config(0.5, 0.3, 1.2);
  c.max_iters = 300;
  c.delta_floor = 0.0;
  StochasticOracle oracle(p, NoiseModel::none(), 0);
  auto gen = DirectionGenerator::quasi_random(2);
  const auto run = ds_run(c, {2.0, 2.0}, gen, oracle, SamplerPolicy::fixed(3));
  const auto ref = reference_run(p, {2.0, 2.0}, 1.0, c, DirectionGenerator::quasi_random(2), 300);
  REQUIRE(run.trace.size() == 300);
  for (std::size_t k = 0; k < 300; ++k) {
    CHECK(run.trace[k].delta == ref.deltas[k]);
    CHECK(run.trace[k].success == ref.success[k]);
  }
  CHECK(run.final_state.x == ref.xs.back());
  CHECK(run.final_state.delta == ref.deltas.back());
}

TEST_CASE("trace laws of noisy runs") {
  const auto p = ProblemRegistry::make("l1norm", 2);
  auto c = config(1.0, 0.1, 1.1);
  c.max_iters = 1500;
  c.delta_floor = 0.0;
  c.eps_f_hint = 2.0 * c.theta * (2.0 - c.tau) / 16.0;
  REQUIRE(validate_theta(c).ok);
  const double k_f = *c.eps_f_hint / 2.0;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    StochasticOracle oracle(p, NoiseModel::gaussian(1.0), seed);
    auto gen = DirectionGenerator::quasi_random(2);
    const auto run = ds_run(c, {2.0, 2.0}, gen, oracle, SamplerPolicy::variance_rule(1.0, k_f, 2000));
    const auto& t = run.trace;
    double cum = 0.0;
    Vector x{2.0, 2.0};
    for (std::size_t k = 0; k < t.size(); ++k) {
      // Acceptance test, bit for bit.
      CHECK(t[k].success == (t[k].est_current - t[k].est_trial >= c.theta * t[k].delta * t[k].delta));
      CHECK(t[k].f_true_current == p(x));
      if (t[k].success) x = axpy(1.0, t[k].step, x);
      if (k + 1 < t.size())
        CHECK(t[k + 1].delta == (t[k].success ? c.tau_bar * t[k].delta : (1.0 - c.tau) * t[k].delta));
      CHECK(t[k].samples_current == SamplerPolicy::variance_rule(1.0, k_f, 2000).samples_for(t[k].delta));
      cum += t[k].delta * t[k].delta;
    }
    CHECK(x == run.final_state.x);
    CHECK(run.final_state.cum_delta_sq == cum);
    CHECK(summarize(t, seed).tail_fraction < 0.01);
  }
}

TEST_CASE("unsuccessful zero-noise steps bound the directional decrease") {
  const auto p = ProblemRegistry::make("max_quadratics", 3);
  auto c = config(0.7, 0.4, 1.3);
  c.max_iters = 400;
  c.delta_floor = 0.0;
  StochasticOracle oracle(p, NoiseModel::none(), 0);
  auto gen = DirectionGenerator::quasi_random(3);
  const auto run = ds_run(c, p.default_start, gen, oracle, SamplerPolicy::fixed(1));
  std::size_t failures = 0;
  for (const auto& r : run.trace) {
    if (r.success) continue;
    ++failures;
    const double slope = (r.est_trial - r.est_current) / r.delta;
    CHECK(slope >= -c.theta * r.delta * (1.0 + 1e-12));
  }
  CHECK(failures > 100);
}

TEST_CASE("delta floor stops the run") {
  const auto p = ProblemRegistry::make("sphere", 2);
  auto c = config(1.0, 0.5, 1.0);
  c.delta_floor = 1e-3;
  c.max_iters = 100'000;
  StochasticOracle oracle(p, NoiseModel::none(), 0);
  auto gen = DirectionGenerator::quasi_random(2);
  const auto run = ds_run(c, {0.0, 0.0}, gen, oracle, SamplerPolicy::fixed(1));
  CHECK(run.final_state.delta < 1e-3);
  CHECK(run.trace.back().delta >= 1e-3);
  CHECK(run.trace.size() == 10);  // 2^-10 < 1e-3 <= 2^-9
}
