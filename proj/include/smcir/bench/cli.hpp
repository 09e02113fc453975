#pragma once

#include <fstream>
#include <iostream>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "smcir/bench/campaigns.hpp"
#include "smcir/bench/config.hpp"
#include "smcir/bench/report.hpp"
#include "smcir/selfcheck.hpp"

namespace smcir {

namespace detail {

inline int write_report(const BenchReport& report, const ExperimentConfig& cfg,
                        std::ostream& out, std::ostream& err) {
  std::ofstream file;
  std::ostream* sink = &out;
  if (!cfg.out.empty()) {
    file.open(cfg.out, std::ios::binary);
    if (!file) {
      err << "error: cannot open output file: " << cfg.out << "\n";
      return 2;
    }
    sink = &file;
  }
  if (cfg.format == "json") {
    write_json(report, *sink);
  } else {
    write_csv(report, *sink);
  }
  return 0;
}

inline void add_common_options(CLI::App* sub, ExperimentConfig& cfg,
                               std::string& config_path, std::string& sizes,
                               std::string& algos) {
  sub->add_option("--config", config_path, "flat key=value config file");
  sub->add_option("--runs", cfg.runs, "Monte Carlo runs P");
  sub->add_option("--horizon", cfg.horizon, "scenario length T");
  sub->add_option("--seed", cfg.seed, "master seed");
  sub->add_option("--threads", cfg.threads,
                  "worker threads (0 = hardware concurrency)");
  sub->add_option("--out", cfg.out, "output path (default: stdout)");
  sub->add_option("--format", cfg.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--algos", algos, "comma list of algorithms to run");
  sub->add_option("--sizes", sizes, "comma list of sample counts N");
  sub->add_option("--particles", sizes,
                  "comma list of final particle counts M");
}

/// Flags override config-file entries: the file is applied first, then
/// every flag the user actually passed.
inline void finalize_config(CLI::App* sub, ExperimentConfig& cfg,
                            const ExperimentConfig& flag_values,
                            const std::string& config_path,
                            const std::string& sizes,
                            const std::string& algos) {
  if (!config_path.empty()) load_config_file(cfg, config_path);
  if (sub->count("--runs")) cfg.runs = flag_values.runs;
  if (sub->count("--horizon")) cfg.horizon = flag_values.horizon;
  if (sub->count("--seed")) cfg.seed = flag_values.seed;
  if (sub->count("--threads")) cfg.threads = flag_values.threads;
  if (sub->count("--out")) cfg.out = flag_values.out;
  if (sub->count("--format")) cfg.format = flag_values.format;
  if (sub->count("--sizes") || sub->count("--particles"))
    apply_config_entry(cfg, "sizes", sizes);
  if (sub->count("--algos")) apply_config_entry(cfg, "algos", algos);
  if (cfg.runs == 0) throw ConfigError("runs must be >= 1");
  if (cfg.horizon == 0) throw ConfigError("horizon must be >= 1");
  if (cfg.sizes.empty()) throw ConfigError("empty size list");
}

}  // namespace detail

/// Benchmark driver: `static`, `arch`, `tracking`, `highdim` run the
/// campaigns; `verify` runs the oracle/property suites.  Exit codes:
/// 0 success, 2 usage/config error, 3 verify failure.
inline int cli_main(std::vector<std::string> args, std::ostream& out,
                    std::ostream& err) {
  CLI::App app{"independent-resampling sequential Monte Carlo benchmarks"};
  app.require_subcommand(1);

  ExperimentConfig flags;
  std::string config_path, sizes, algos;
  bool budget_flag = true;
  bool informative = false;

  auto* s_static = app.add_subcommand("static", "conjugate-Gaussian static estimators");
  auto* s_arch = app.add_subcommand("arch", "ARCH model filters vs the fully adapted baseline");
  auto* s_tracking = app.add_subcommand("tracking", "range-bearing tracking at a fixed budget");
  auto* s_highdim = app.add_subcommand("highdim", "dimension sweep on the linear-Gaussian family");
  auto* s_verify = app.add_subcommand("verify", "run the oracle and property suites");

  for (auto* sub : {s_static, s_arch, s_tracking, s_highdim})
    detail::add_common_options(sub, flags, config_path, sizes, algos);
  s_tracking->add_flag("--budget-matched,!--no-budget-matched", budget_flag,
                       "match the classical baseline's budget (default on)");
  s_highdim->add_flag("--budget-matched,!--no-budget-matched", budget_flag,
                      "match the classical baseline's budget (default on)");
  s_tracking->add_flag("--informative", informative,
                       "sharp-measurement parameter set");
  std::string dims;
  s_highdim->add_option("--dims", dims, "comma list of state dimensions m");

  std::uint64_t verify_seed = 20240808;
  s_verify->add_option("--seed", verify_seed, "seed for the property suites");
  // Negative-path self-test: swap in a deliberately biased resampler
  // and require verify to catch it (exit 3).
  bool verify_bias = false;
  s_verify->add_flag("--self-test-bias", verify_bias)->group("");

  try {
    std::vector<const char*> argv;
    argv.push_back("smcbench");
    for (const auto& a : args) argv.push_back(a.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  if (s_verify->parsed()) {
    SelfcheckHooks hooks;
    if (verify_bias) {
      hooks.resampler = [](std::span<const double> w, std::size_t m,
                           RngStream&) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < w.size(); ++i)
          if (w[i] > w[best]) best = i;
        return std::vector<std::size_t>(m, best);
      };
    }
    const auto checks = run_selfchecks(verify_seed, hooks);
    bool all = true;
    for (const auto& c : checks) {
      out << (c.pass ? "[ ok ] " : "[fail] ") << c.name;
      if (!c.detail.empty()) out << " — " << c.detail;
      out << "\n";
      all = all && c.pass;
    }
    out << (all ? "verify: all checks passed\n" : "verify: FAILURES\n");
    return all ? 0 : 3;
  }

  try {
    ExperimentConfig cfg;
    CLI::App* active = nullptr;
    BenchReport report;
    if (s_static->parsed()) {
      active = s_static;
      cfg.model = "static";
      detail::finalize_config(active, cfg, flags, config_path, sizes, algos);
      report = run_static_bench(cfg);
    } else if (s_arch->parsed()) {
      active = s_arch;
      cfg.model = "arch";
      cfg.sizes = {5, 10, 15, 25, 50};
      detail::finalize_config(active, cfg, flags, config_path, sizes, algos);
      report = run_arch_bench(cfg);
    } else if (s_tracking->parsed()) {
      active = s_tracking;
      cfg.model = "tracking";
      cfg.sizes = {10, 20, 30, 40, 50};
      detail::finalize_config(active, cfg, flags, config_path, sizes, algos);
      cfg.budget_matched = budget_flag;
      if (informative) cfg.informative = true;
      report = run_tracking_bench(cfg);
    } else {
      active = s_highdim;
      cfg.model = "highdim";
      cfg.sizes = {100};
      detail::finalize_config(active, cfg, flags, config_path, sizes, algos);
      cfg.budget_matched = budget_flag;
      if (active->count("--dims")) apply_config_entry(cfg, "dims", dims);
      report = run_highdim_bench(cfg);
    }
    return detail::write_report(report, cfg, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace smcir
