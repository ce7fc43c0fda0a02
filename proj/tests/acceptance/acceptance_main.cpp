// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "sdfo/diagnostics.hpp"
#include "sdfo/direct_search.hpp"
#include "sdfo/experiment.hpp"
#include "sdfo/problems.hpp"
#include "sdfo/tail_audit.hpp"
#include "sdfo/tr_subproblem.hpp"
#include "sdfo/trust_region.hpp"

using namespace sdfo;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Vector unit(Vector v) {
  const double n = norm2(v);
  for (double& x : v) x /= n;
  return v;
}

Matrix random_orthogonal(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix q(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    Vector v(n);
    for (double& x : v) x = normal(rng);
    for (std::size_t k = 0; k < j; ++k) {
      const Vector c = q.column(k);
      v = axpy(-dot(c, v), c, v);
    }
    const double nv = norm2(v);
    for (std::size_t i = 0; i < n; ++i) q(i, j) = v[i] / nv;
  }
  return q;
}

// Empty string when the KKT conditions of a global minimizer hold.
std::string certificate_failure(const QuadraticModel& m, const SubproblemSolution& sol) {
  const double delta = m.radius;
  const double ns = norm2(sol.s);
  if (ns > delta * (1.0 + 1e-10)) return "infeasible step";
  if (sol.on_boundary && std::abs(ns - delta) > 1e-8 * delta) return "boundary flag without ||s|| = delta";
  if (sol.multiplier < 0.0) return "negative multiplier";
  if (sol.multiplier * (delta - ns) > 1e-8) return "complementarity";
  Matrix shifted = m.B;
  for (std::size_t i = 0; i < shifted.rows(); ++i) shifted(i, i) += sol.multiplier;
  if (symmetric_eigen(shifted).values.front() < -1e-8) return "B + lambda I not PSD";
  if (norm2(axpy(1.0, m.g, matvec(shifted, sol.s))) > 1e-8 * (1.0 + sol.multiplier)) return "stationarity";
  return "";
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome criterion_subproblem() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1001);
  std::uniform_real_distribution<double> spread(-10.0, 10.0);
  std::uniform_real_distribution<double> gap(0.5, 10.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::size_t instances = 0;
  std::size_t hard_flagged = 0;
  std::string failure;
  for (std::size_t n = 1; n <= 5; ++n) {
    for (int rep = 0; rep < 200; ++rep) {
      const Matrix q = random_orthogonal(n, rng);
      Vector lam(n);
      Vector g(n, 0.0);
      double radius = std::exp(normal(rng));
      // 20 constructed hard cases per n >= 2: g orthogonal to the lowest
      // eigenvector and a radius large enough for the shifted Newton point.
      const bool hard = n >= 2 && rep < 20;
      if (hard) {
        lam[0] = -gap(rng);
        for (std::size_t i = 1; i < n; ++i) lam[i] = lam[0] + gap(rng);
        for (std::size_t j = 1; j < n; ++j) g = axpy(normal(rng), q.column(j), g);
        radius = 20.0 * std::exp(0.3 * normal(rng));
      } else {
        for (double& v : lam) v = spread(rng);
        for (double& v : g) v = normal(rng);
      }
      const QuadraticModel m{unit(g), reconstruct(q, lam), radius};
      const auto sol = solve_exact(m);
      ++instances;
      hard_flagged += hard && sol.hard_case ? 1 : 0;
      const std::string why = certificate_failure(m, sol);
      if (!why.empty() && failure.empty()) failure = "n=" + std::to_string(n) + " rep=" + std::to_string(rep) + ": " + why;
      const double oracle = brute_force_min(m, 100'000, rng()).value;
      if (sol.model_decrease > oracle + 1e-6 && failure.empty())
        failure = "n=" + std::to_string(n) + " rep=" + std::to_string(rep) + ": brute force beat the solver";
    }
  }
  const double secs = seconds_since(t0);
  char buf[200];
  std::snprintf(buf, sizeof buf, "%zu instances, %zu hard cases flagged, %.1f s%s%s", instances, hard_flagged, secs,
                failure.empty() ? "" : "; ", failure.c_str());
  return {failure.empty() && hard_flagged >= 20 && secs < 60.0, buf};
}

AuditSetup gaussian_setup(double k_f) {
  const auto p = ProblemRegistry::make("sphere", 2);
  return AuditSetup{p, NoiseModel::gaussian(1.0), p.default_start, {1.0, 0.0}, SamplerPolicy::variance_rule(1.0, k_f),
                    2024, 1};
}

Outcome criterion_tail_audit() {
  const auto t0 = Clock::now();
  const double k_f = 1.0;
  TailAuditSpec spec;
  spec.eps_f = 2.0 * k_f;
  spec.eps_q = 4.0 * k_f * k_f;
  spec.trials = 100'000;
  const auto setup = gaussian_setup(k_f);
  std::vector<ErrorSample> samples;
  for (std::size_t i = 0; i < spec.delta_grid.size(); ++i)
    samples.push_back(collect_errors(setup, spec.delta_grid[i], i, spec.trials));
  const auto a1 = score_a1(samples, spec);
  const auto a2 = score_a2(samples, spec);
  const double secs = seconds_since(t0);
  double worst = 0.0;
  for (const auto* r : {&a1, &a2})
    for (const auto& c : r->cells) worst = std::max(worst, c.wilson_upper / c.p);
  char buf[200];
  std::snprintf(buf, sizeof buf, "A1 %s, A2 %s over %zu cells each, max upper/p = %.3g, %.1f s",
                a1.pass() ? "pass" : "FAIL", a2.pass() ? "pass" : "FAIL", a1.cells.size(), worst, secs);
  return {a1.pass() && a2.pass() && a1.cells.size() == 12 && secs < 300.0, buf};
}

Outcome criterion_variance() {
  const double k_f = 1.0;
  const auto report = audit_variance_condition(gaussian_setup(k_f), k_f, {1.0, 0.5, 0.25}, 100'000);
  double worst = 0.0;
  for (const auto& c : report.cells) worst = std::max(worst, c.second_moment / c.bound);
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu cells, max moment/bound = %.4f", report.cells.size(), worst);
  return {report.pass(), buf};
}

struct BatchStats {
  int converged = 0;
  double median_distance = 0.0;
};

BatchStats l1_batch(const std::string& algorithm) {
  const std::string block = algorithm == "direct_search"
                                ? R"("direct_search": {"delta0": 1, "theta": 1, "tau": 0.1, "tau_bar": 1.1,
                                     "max_iters": 2000, "delta_floor": 0})"
                                : R"("trust_region": {"delta0": 1, "delta_max": 1, "theta": 1, "tau": 0.1,
                                     "tau_bar": 1.1, "hessian": "zero", "max_iters": 2000, "delta_floor": 0})";
  std::string seeds;
  for (int s = 0; s < 20; ++s) seeds += (s ? "," : "") + std::to_string(s);
  // k_f defaults to theta (2 - tau) / 16 (times min(1, M_bar) for trust region).
  const auto cfg = parse_config(R"({"schema_version": 1, "algorithm": ")" + algorithm + R"(",
    "problem": {"name": "l1norm", "dimension": 2, "x0": [2, 2]},
    "noise": {"kind": "gaussian", "variance": 1.0},
    "sampler": {"rule": "variance", "max_samples": 10000},
    )" + block + R"(, "seeds": [)" + seeds + "]}");
  const auto problem = ProblemRegistry::make("l1norm", 2);
  BatchStats stats;
  std::vector<double> distances;
  for (std::uint64_t seed : cfg.seeds) {
    const auto run = run_single(cfg, seed);
    const auto summary = summarize(run.trace, seed);
    if (run.final_delta < 1e-3 * 1.0 && summary.tail_fraction < 0.01) ++stats.converged;
    distances.push_back(stationarity_proxy(run.final_x, problem));
  }
  std::sort(distances.begin(), distances.end());
  stats.median_distance = 0.5 * (distances[9] + distances[10]);
  return stats;
}

// Hand-written deterministic reference: no oracle, no sampler, plain arithmetic.
struct Reference {
  std::vector<Vector> xs;
  std::vector<double> deltas;
  std::vector<bool> success;
};

double sphere2(const Vector& x) { return x[0] * x[0] + x[1] * x[1]; }

Reference reference_direct_search(Vector x, double delta, double theta, double tau, double tau_bar,
                                  const std::vector<Vector>& cycle, int iters) {
  Reference ref;
  for (int k = 0; k < iters; ++k) {
    const Vector& g = cycle[k % cycle.size()];
    const Vector y = {x[0] + delta * g[0], x[1] + delta * g[1]};
    const bool ok = sphere2(x) - sphere2(y) >= theta * delta * delta;
    ref.xs.push_back(x);
    ref.deltas.push_back(delta);
    ref.success.push_back(ok);
    if (ok) {
      x = y;
      delta = tau_bar * delta;
    } else {
      delta = (1.0 - tau) * delta;
    }
  }
  return ref;
}

Reference reference_trust_region(Vector x, double delta, double delta_max, double theta, double tau, double tau_bar,
                                 const std::vector<Vector>& cycle, int iters) {
  Reference ref;
  for (int k = 0; k < iters; ++k) {
    const Vector& g = cycle[k % cycle.size()];
    const Vector s = {-delta * g[0], -delta * g[1]};
    const double sn = std::sqrt(s[0] * s[0] + s[1] * s[1]);
    const Vector y = {x[0] + s[0], x[1] + s[1]};
    const bool ok = (sphere2(x) - sphere2(y)) / (theta * sn * sn) >= 1.0;
    ref.xs.push_back(x);
    ref.deltas.push_back(delta);
    ref.success.push_back(ok);
    if (ok) {
      x = y;
      delta = std::min(delta_max, tau_bar * delta);
    } else {
      delta = (1.0 - tau) * delta;
    }
  }
  return ref;
}

bool matches(const Trace& trace, const Vector& final_x, const Reference& ref, const Vector& ref_final) {
  if (trace.size() != ref.xs.size()) return false;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    if (trace[k].delta != ref.deltas[k] || trace[k].success != ref.success[k]) return false;
    if (trace[k].f_true_current != sphere2(ref.xs[k])) return false;
  }
  return final_x == ref_final;
}

Outcome criterion_zero_noise() {
  std::vector<Vector> cycle;
  for (int i = 0; i < 7; ++i) {
    const double a = 2.0 * std::numbers::pi * (0.13 + 3.0 * i / 7.0);
    cycle.push_back(unit({std::cos(a), std::sin(a)}));
  }
  const Vector x0 = {1.0, -0.5};
  const int iters = 50;
  const auto problem = ProblemRegistry::make("sphere", 2);

  DirectSearchConfig dc;
  dc.theta = 0.5;
  dc.tau = 0.5;
  dc.tau_bar = 1.5;
  dc.max_iters = iters;
  dc.delta_floor = 0.0;
  StochasticOracle o1(problem, NoiseModel::none(), 0);
  auto g1 = DirectionGenerator::fixed_cycle(cycle);
  const auto ds = ds_run(dc, x0, g1, o1, SamplerPolicy::fixed(1));
  auto ds_ref = reference_direct_search(x0, dc.delta0, dc.theta, dc.tau, dc.tau_bar, cycle, iters + 1);
  const Vector ds_final = ds_ref.xs.back();
  ds_ref.xs.pop_back();
  ds_ref.deltas.pop_back();
  ds_ref.success.pop_back();

  TrustRegionConfig tc;
  tc.delta0 = 1.0;
  tc.delta_max = 1.5;
  tc.theta = 0.5;
  tc.tau = 0.5;
  tc.tau_bar = 1.5;
  tc.max_iters = iters;
  tc.delta_floor = 0.0;
  StochasticOracle o2(problem, NoiseModel::none(), 0);
  auto g2 = DirectionGenerator::fixed_cycle(cycle);
  const auto tr = tr_run(tc, x0, g2, o2, SamplerPolicy::fixed(1));
  auto tr_ref = reference_trust_region(x0, tc.delta0, tc.delta_max, tc.theta, tc.tau, tc.tau_bar, cycle, iters + 1);
  const Vector tr_final = tr_ref.xs.back();
  tr_ref.xs.pop_back();
  tr_ref.deltas.pop_back();
  tr_ref.success.pop_back();

  const bool ds_ok = matches(ds.trace, ds.final_state.x, ds_ref, ds_final);
  const bool tr_ok = matches(tr.trace, tr.final_state.x, tr_ref, tr_final);
  int ds_successes = 0;
  for (bool s : ds_ref.success) ds_successes += s ? 1 : 0;
  char buf[160];
  std::snprintf(buf, sizeof buf, "direct search %s, trust region %s (reference: %d/%d successes)",
                ds_ok ? "exact" : "DIFFERS", tr_ok ? "exact" : "DIFFERS", ds_successes, iters);
  return {ds_ok && tr_ok, buf};
}

Outcome criterion_alignment() {
  Matrix a(2, 2);
  a(0, 0) = 3.0;
  a(0, 1) = a(1, 0) = 1.0;
  a(1, 1) = 2.0;
  TestProblem quad;
  quad.name = "quadratic";
  quad.dimension = 2;
  quad.eval_true = [a](std::span<const double> x) { return 0.5 * quadratic_form(a, x); };
  TrustRegionConfig c;
  c.delta0 = 1.0;
  c.delta_max = 1.0;
  c.theta = 1.0;
  c.tau = 0.3;
  c.tau_bar = 1.2;
  c.hessian = HessianPolicy::RegressionClipped;
  c.q = 0.5;
  c.m = c.M = 10.0;
  c.max_iters = 500;
  c.delta_floor = 0.0;
  StochasticOracle oracle(quad, NoiseModel::none(), 0);
  auto gen = DirectionGenerator::quasi_random(2);
  const auto run = tr_run(c, {1.0, -1.0}, gen, oracle, SamplerPolicy::fixed(1));
  const std::size_t begin = run.trace.size() - run.trace.size() / 4;
  double worst = 0.0;
  bool degenerate = false;
  for (std::size_t k = begin; k < run.trace.size(); ++k) {
    if (norm2(run.trace[k].step) == 0.0) {
      degenerate = true;
      continue;
    }
    worst = std::max(worst, alignment_profile({run.trace[k]}).front());
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu iterations, max residual in final quartile = %.3e, final delta = %.3e",
                run.trace.size(), worst, run.final_state.delta);
  return {run.trace.size() == 500 && !degenerate && worst < 0.1, buf};
}

Outcome criterion_heavy_tail() {
  const auto t0 = Clock::now();
  const double r = 1.5;
  const double h = 3.0;
  const double eps_q = 1.0;
  const auto noise = NoiseModel::pareto_symmetric(r, 0.1);
  const auto sampler = SamplerPolicy::moment_rule(noise.declared_moment().bound, r, h, eps_q);
  const auto p = ProblemRegistry::make("sphere", 2);
  const AuditSetup setup{p, noise, p.default_start, {1.0, 0.0}, sampler, 77, 1};
  TailAuditSpec spec;
  spec.eps_q = eps_q;
  spec.h = h;
  spec.trials = 100'000;
  spec.delta_grid = {1.0, 0.5};
  spec.alpha_grid = {1.0, 2.0, 4.0, 8.0, 16.0};
  const auto report = audit_generalized(setup, spec);
  char buf[200];
  std::snprintf(buf, sizeof buf, "%zu cells, samples per estimate %llu / %llu, %.1f s", report.cells.size(),
                static_cast<unsigned long long>(sampler.samples_for(1.0)),
                static_cast<unsigned long long>(sampler.samples_for(0.5)), seconds_since(t0));
  return {report.pass() && report.cells.size() == 10, buf};
}

Outcome criterion_density() {
  auto directions = [] {
    auto gen = DirectionGenerator::quasi_random(3);
    std::vector<Vector> out;
    for (int i = 0; i < 10'000; ++i) out.push_back(gen.next());
    return out;
  };
  const auto first = directions();
  const bool deterministic = first == directions();
  std::mt19937_64 rng(99);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double cos30 = std::cos(std::numbers::pi / 6.0);
  int hit = 0;
  for (int c = 0; c < 100; ++c) {
    const Vector centre = unit({normal(rng), normal(rng), normal(rng)});
    hit += std::any_of(first.begin(), first.end(), [&](const Vector& d) { return dot(d, centre) >= cos30; }) ? 1 : 0;
  }
  char buf[120];
  std::snprintf(buf, sizeof buf, "%d/100 caps hit, repeat %s", hit, deterministic ? "identical" : "DIFFERS");
  return {hit == 100 && deterministic, buf};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& fn) {
    Outcome out;
    try {
      out = fn();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    failures += out.pass ? 0 : 1;
    std::printf("criterion %d [%s] %s: %s\n", id, out.pass ? "PASS" : "FAIL", name, out.detail.c_str());
    std::fflush(stdout);
  };

  report(1, "subproblem exactness", criterion_subproblem);
  report(2, "tail-bound audit", criterion_tail_audit);
  report(3, "variance condition", criterion_variance);

  BatchStats ds;
  BatchStats tr;
  report(4, "radius summability", [&] {
    ds = l1_batch("direct_search");
    tr = l1_batch("trust_region");
    char buf[120];
    std::snprintf(buf, sizeof buf, "direct search %d/20, trust region %d/20 seeds converged", ds.converged,
                  tr.converged);
    return Outcome{ds.converged >= 18 && tr.converged >= 18, buf};
  });
  report(5, "stationarity", [&] {
    char buf[120];
    std::snprintf(buf, sizeof buf, "median distance: direct search %.3e, trust region %.3e", ds.median_distance,
                  tr.median_distance);
    return Outcome{ds.median_distance < 0.05 && tr.median_distance < 0.05, buf};
  });
  report(6, "zero-noise collapse", criterion_zero_noise);
  report(7, "step alignment", criterion_alignment);
  report(8, "heavy-tail audit", criterion_heavy_tail);
  report(9, "direction density", criterion_density);

  std::printf("%s: %d of 9 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
