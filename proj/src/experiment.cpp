#include "sdfo/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "sdfo/problems.hpp"
#include "sdfo/rng.hpp"
#include "sdfo/sphere_directions.hpp"

namespace sdfo {

namespace {

DirectionGenerator make_generator(const DirectionSpec& d, std::size_t dimension, std::uint64_t seed) {
  if (d.scheme == "fixed_cycle") return DirectionGenerator::fixed_cycle(d.vectors);
  if (d.scheme == "uniform_random") return DirectionGenerator::uniform_random(dimension, derive_seed(d.seed, seed));
  return DirectionGenerator::quasi_random(dimension);
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

std::string resolve_output_dir(const ExperimentConfig& cfg, const RunOptions& opts) {
  if (opts.out_dir) return *opts.out_dir;
  if (const char* env = std::getenv("SDFO_OUT_DIR"); env && *env) return env;
  return cfg.output.dir;
}

std::vector<std::string> theta_warnings(const ExperimentConfig& cfg) {
  std::vector<std::string> out;
  if (cfg.algorithm == Algorithm::DirectSearch) {
    if (auto v = validate_theta(cfg.direct_search); !v.ok) out.push_back(v.message);
  } else if (cfg.algorithm == Algorithm::TrustRegion) {
    if (auto v = validate_theta_tr(cfg.trust_region); !v.ok) out.push_back(v.message);
  }
  return out;
}

SeedRun run_single(const ExperimentConfig& cfg, std::uint64_t seed) {
  if (cfg.algorithm == Algorithm::Audit) throw InputError("run_single: audit configs have no optimization run");
  const TestProblem problem = ProblemRegistry::make(cfg.problem.name, cfg.problem.dimension);
  const Vector x0 = cfg.problem.x0.value_or(problem.default_start);
  StochasticOracle oracle(problem, cfg.noise, derive_seed(seed, 0));
  DirectionGenerator gen = make_generator(cfg.directions, problem.dimension, seed);

  SeedRun run;
  run.seed = seed;
  if (cfg.algorithm == Algorithm::DirectSearch) {
    auto r = ds_run(cfg.direct_search, x0, gen, oracle, cfg.sampler);
    run.trace = std::move(r.trace);
    run.final_x = std::move(r.final_state.x);
    run.final_delta = r.final_state.delta;
  } else {
    auto r = tr_run(cfg.trust_region, x0, gen, oracle, cfg.sampler);
    run.trace = std::move(r.trace);
    run.final_x = std::move(r.final_state.x);
    run.final_delta = r.final_state.delta;
  }
  if (!run.trace.empty()) {
    run.summary = summarize(run.trace, seed, problem.optimum_value);
    if (!problem.stationary_points.empty()) run.summary->stationarity = stationarity_proxy(run.final_x, problem);
  }
  return run;
}

std::string trace_filename(const ExperimentConfig& cfg, std::uint64_t seed) {
  return "trace_" + to_string(cfg.algorithm) + "_" + cfg.problem.name + "_seed" + std::to_string(seed) + ".csv";
}

std::string summary_filename(const ExperimentConfig& cfg) {
  return "summary_" + to_string(cfg.algorithm) + "_" + cfg.problem.name + ".csv";
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
  const std::filesystem::path dir = resolve_output_dir(cfg, opts);
  std::filesystem::create_directories(dir);

  ExperimentResult result;
  result.runs.resize(cfg.seeds.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < cfg.seeds.size(); i = next++) {
      try {
        const std::uint64_t seed = cfg.seeds[i] + opts.seed_offset;
        SeedRun run = run_single(cfg, seed);
        if (cfg.output.trace_csv) {
          auto out = open_output(dir / trace_filename(cfg, seed));
          write_trace_csv(out, run.trace,
                          "algorithm=" + to_string(cfg.algorithm) + " problem=" + cfg.problem.name +
                              " dimension=" + std::to_string(cfg.problem.dimension) + " seed=" + std::to_string(seed));
        }
        result.runs[i] = std::move(run);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(opts.jobs, static_cast<unsigned>(cfg.seeds.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  if (cfg.output.trace_csv)
    for (const auto& r : result.runs) result.files.push_back((dir / trace_filename(cfg, r.seed)).string());
  if (cfg.output.summary_csv) {
    std::vector<RunSummary> rows;
    for (const auto& r : result.runs)
      if (r.summary) rows.push_back(*r.summary);
    const auto path = dir / summary_filename(cfg);
    auto out = open_output(path);
    write_summary_csv(out, rows);
    result.files.push_back(path.string());
  }
  return result;
}

bool AuditResult::pass() const {
  const bool tails = std::all_of(reports.begin(), reports.end(), [](const AuditReport& r) { return r.pass(); });
  return tails && (!variance || variance->pass());
}

AuditResult run_audit(const ExperimentConfig& cfg, const RunOptions& opts) {
  const auto& a = cfg.audit;
  a.spec.validate();
  const std::filesystem::path dir = resolve_output_dir(cfg, opts);
  std::filesystem::create_directories(dir);

  AuditSetup setup;
  setup.problem = ProblemRegistry::make(cfg.problem.name, cfg.problem.dimension);
  setup.noise = cfg.noise;
  setup.x = a.x.value_or(cfg.problem.x0.value_or(setup.problem.default_start));
  if (a.g) {
    setup.g = *a.g;
  } else {
    setup.g.assign(cfg.problem.dimension, 0.0);
    setup.g[0] = 1.0;
  }
  setup.sampler = cfg.sampler;
  setup.seed = (cfg.seeds.empty() ? 0 : cfg.seeds.front()) + opts.seed_offset;
  setup.threads = std::max(a.threads, opts.jobs);

  const bool generalized = std::find(a.checks.begin(), a.checks.end(), "generalized") != a.checks.end();
  if (generalized) {
    const double r = tail_order(a.spec.h);
    if (cfg.noise.kind() != NoiseModel::Kind::None && cfg.noise.declared_moment().order < r - 1e-12)
      throw InputError("audit: noise moment order " + format_double(cfg.noise.declared_moment().order) +
                       " is below r(h) = " + format_double(r));
  }

  // One error sample per delta serves every requested check.
  std::vector<ErrorSample> samples;
  for (std::size_t i = 0; i < a.spec.delta_grid.size(); ++i)
    samples.push_back(collect_errors(setup, a.spec.delta_grid[i], i, a.spec.trials));

  AuditResult result;
  std::string text;
  for (const auto& check : a.checks) {
    const std::string stem = "audit_" + check + "_" + cfg.problem.name;
    if (check == "variance") {
      result.variance = score_variance(samples, a.k_f);
      auto out = open_output(dir / (stem + ".csv"));
      write_variance_csv(out, *result.variance);
      text += to_text(*result.variance);
    } else {
      AuditReport report = check == "a1"   ? score_a1(samples, a.spec)
                           : check == "a2" ? score_a2(samples, a.spec)
                                           : score_generalized(samples, a.spec);
      auto out = open_output(dir / (stem + ".csv"));
      write_report_csv(out, report);
      text += to_text(report);
      result.reports.push_back(std::move(report));
    }
    result.files.push_back((dir / (stem + ".csv")).string());
  }
  const auto summary_path = dir / ("audit_" + cfg.problem.name + ".txt");
  auto out = open_output(summary_path);
  out << text << "overall: " << (result.pass() ? "PASS" : "FAIL") << '\n';
  result.files.push_back(summary_path.string());
  return result;
}

}  // namespace sdfo
