// sdfo: run stochastic direct-search / trust-region batches and tail audits.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sdfo/experiment.hpp"
#include "sdfo/problems.hpp"

namespace {

int do_run(const std::string& path, const sdfo::RunOptions& opts) {
  const sdfo::ExperimentConfig cfg = sdfo::load_config(path);
  if (cfg.algorithm == sdfo::Algorithm::Audit) {
    std::cerr << "sdfo: config has algorithm 'audit'; use `sdfo audit`\n";
    return 2;
  }
  for (const auto& w : sdfo::theta_warnings(cfg)) std::cerr << "warning: " << w << '\n';
  const auto result = sdfo::run_experiment(cfg, opts);
  for (const auto& r : result.runs) {
    if (!r.summary) {
      std::printf("seed %llu: 0 iterations\n", static_cast<unsigned long long>(r.seed));
      continue;
    }
    const auto& s = *r.summary;
    std::printf("seed %llu: iters=%llu final_delta=%.3e tail_fraction=%.3e f=%.6e success_rate=%.3f",
                static_cast<unsigned long long>(s.seed), static_cast<unsigned long long>(s.iterations), s.final_delta,
                s.tail_fraction, s.final_f_true, s.success_rate);
    if (s.stationarity) std::printf(" dist=%.3e", *s.stationarity);
    std::printf("\n");
  }
  std::printf("wrote %zu files to %s\n", result.files.size(), sdfo::resolve_output_dir(cfg, opts).c_str());
  return 0;
}

int do_audit(const std::string& path, const sdfo::RunOptions& opts) {
  const sdfo::ExperimentConfig cfg = sdfo::load_config(path);
  if (cfg.algorithm != sdfo::Algorithm::Audit) {
    std::cerr << "sdfo: config algorithm is '" << sdfo::to_string(cfg.algorithm) << "'; use `sdfo run`\n";
    return 2;
  }
  const auto result = sdfo::run_audit(cfg, opts);
  for (const auto& r : result.reports) std::cout << sdfo::to_text(r);
  if (result.variance) std::cout << sdfo::to_text(*result.variance);
  std::cout << "overall: " << (result.pass() ? "PASS" : "FAIL") << '\n';
  return result.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic derivative-free optimization harness"};
  app.require_subcommand(1);
  app.fallthrough();

  sdfo::RunOptions opts;
  std::string out_dir;
  app.add_option("--jobs", opts.jobs, "Concurrent seeds (runs) or audit worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", out_dir, "Output directory (overrides SDFO_OUT_DIR and the config)");
  app.add_option("--seed-offset", opts.seed_offset, "Added to every configured seed");

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run an optimization batch from a JSON config");
  run->add_option("config", config_path, "Config file")->required();
  auto* audit = app.add_subcommand("audit", "Run the tail-bound audit from a JSON config");
  audit->add_option("config", config_path, "Config file")->required();
  auto* list = app.add_subcommand("list-problems", "List the benchmark problems");

  CLI11_PARSE(app, argc, argv);
  if (!out_dir.empty()) opts.out_dir = out_dir;

  try {
    if (list->parsed()) {
      for (const auto& name : sdfo::ProblemRegistry::names())
        std::printf("%-18s %s\n", name.c_str(), sdfo::ProblemRegistry::describe(name).c_str());
      return 0;
    }
    if (run->parsed()) return do_run(config_path, opts);
    if (audit->parsed()) return do_audit(config_path, opts);
  } catch (const std::exception& e) {
    std::cerr << "sdfo: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
