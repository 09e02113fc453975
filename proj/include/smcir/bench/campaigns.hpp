#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "smcir/bench/config.hpp"
#include "smcir/bench/report.hpp"
#include "smcir/filter_runs.hpp"
#include "smcir/kalman.hpp"
#include "smcir/models/arch.hpp"
#include "smcir/models/linear_gaussian.hpp"
#include "smcir/models/range_bearing.hpp"
#include "smcir/models/static_gaussian.hpp"
#include "smcir/static_estimators.hpp"

namespace smcir {

/// Run `body(p)` for p in [0, runs) across a small thread pool.  Each
/// run writes only its own pre-allocated slots, so results are
/// identical whatever the thread count.
inline void parallel_runs(std::size_t runs, unsigned threads,
                          const std::function<void(std::size_t)>& body) {
  if (threads <= 1 || runs <= 1) {
    for (std::size_t p = 0; p < runs; ++p) body(p);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t p = next.fetch_add(1);
      if (p >= runs) return;
      body(p);
    }
  };
  std::vector<std::thread> pool;
  const unsigned count = std::min<unsigned>(threads, runs);
  pool.reserve(count);
  for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

namespace detail {

/// Stream layout: slot 0 of every run draws the data, later slots
/// drive one (size, algorithm) pair each, so adding an algorithm or a
/// size never perturbs the draws of the others.
inline std::uint64_t run_stream_id(std::size_t run, std::size_t slot) {
  return (static_cast<std::uint64_t>(run) + 1) * 1024 + slot;
}

inline std::size_t algo_slot(std::size_t size_idx, std::size_t algo_idx) {
  return 1 + size_idx * 8 + algo_idx;
}

/// Accumulated per-run results of one (model, algo, size) cell.
struct AlgoSeries {
  std::string model;
  std::string algo;
  long long n = 0;
  long long m = 0;
  std::vector<std::vector<double>> sq;  // [run][step] squared errors
  std::vector<double> ess;              // per-run mean normalized ESS
  std::vector<double> degenerate;       // per-run degenerate step count
  std::vector<std::uint64_t> ops;       // per-run sampling operations
  std::vector<double> wall_ms;          // per-run wall time
  bool with_ess = true;

  explicit AlgoSeries(std::string model_, std::string algo_, long long n_,
                      long long m_, std::size_t runs, bool with_ess_ = true)
      : model(std::move(model_)),
        algo(std::move(algo_)),
        n(n_),
        m(m_),
        sq(runs),
        ess(runs, 1.0),
        degenerate(runs, 0.0),
        ops(runs, 0),
        wall_ms(runs, 0.0),
        with_ess(with_ess_) {}
};

inline void emit_series(BenchReport& report, const AlgoSeries& s) {
  auto row = [&](long long run, const std::string& metric, double value) {
    report.rows.push_back({s.model, s.algo, s.n, s.m, run, metric, value});
  };
  row(-1, "rmse_time_avg", rmse_from_sq(s.sq));
  if (s.with_ess) {
    double ess = 0.0;
    for (double e : s.ess) ess += e;
    row(-1, "ess_norm_mean", ess / static_cast<double>(s.ess.size()));
  }
  double degen = 0.0;
  for (double d : s.degenerate) degen += d;
  row(-1, "degenerate_steps", degen);
  row(-1, "sampling_ops", static_cast<double>(s.ops.front()));
  double wall = 0.0;
  for (double w : s.wall_ms) wall += w;
  row(-1, "wall_ms", wall);
  for (std::size_t p = 0; p < s.sq.size(); ++p)
    row(static_cast<long long>(p), "rmse_time_avg", rmse_single_run(s.sq[p]));
  if (s.with_ess)
    for (std::size_t p = 0; p < s.ess.size(); ++p)
      row(static_cast<long long>(p), "ess_norm_mean", s.ess[p]);
}

inline bool algo_enabled(const ExperimentConfig& cfg, const std::string& a) {
  if (cfg.algos.empty()) return true;
  for (const auto& x : cfg.algos)
    if (x == a) return true;
  return false;
}

class StopWatch {
 public:
  StopWatch() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

/// Conjugate-Gaussian comparison of the six static estimators at equal
/// final sample count; RMSE is measured against the true draw of X.
inline BenchReport run_static_bench(const ExperimentConfig& cfg) {
  BenchReport report;
  report.config_hash = config_hash(cfg);
  report.config_echo = serialize_config(cfg);

  static const char* names[6] = {"SIS",   "SIR",   "SIR-w",
                                 "I-SIR", "SIR-2", "I-SIR-w"};
  std::vector<std::vector<detail::AlgoSeries>> cells;  // [size][algo]
  for (std::size_t si = 0; si < cfg.sizes.size(); ++si) {
    const long long n = static_cast<long long>(cfg.sizes[si]);
    std::vector<detail::AlgoSeries> row;
    for (auto* name : names) {
      const long long inter = std::string(name) == "SIR-2" ? n * n : n;
      row.emplace_back("static-gaussian", name, inter, n, cfg.runs, false);
    }
    cells.push_back(std::move(row));
  }

  parallel_runs(cfg.runs, cfg.effective_threads(), [&](std::size_t p) {
    RngStream data(cfg.seed, detail::run_stream_id(p, 0));
    const double x_true = std::sqrt(cfg.sigma_x2) * data.normal();
    const double y = x_true + std::sqrt(cfg.sigma_y2) * data.normal();
    const auto target = static_gaussian_target(cfg.sigma_x2, cfg.sigma_y2, y);

    for (std::size_t si = 0; si < cfg.sizes.size(); ++si) {
      const std::size_t n = cfg.sizes[si];
      auto record = [&](std::size_t ai, const StaticEstimate& est,
                        double wall) {
        auto& cell = cells[si][ai];
        const double err = est.value - x_true;
        cell.sq[p] = {err * err};
        cell.ops[p] = est.sampling_ops;
        cell.wall_ms[p] = wall;
      };
      for (std::size_t ai = 0; ai < 6; ++ai) {
        if (ai == 5) continue;  // handled with the I-SIR rows below
        const bool isir_pair =
            ai == 3 && (detail::algo_enabled(cfg, "I-SIR") ||
                        detail::algo_enabled(cfg, "I-SIR-w"));
        if (!isir_pair && !detail::algo_enabled(cfg, names[ai])) {
          cells[si][ai].sq[p] = {0.0};
          continue;
        }
        RngStream rng(cfg.seed,
                      detail::run_stream_id(p, detail::algo_slot(si, ai)));
        detail::StopWatch watch;
        switch (ai) {
          case 0: {
            const auto est = estimate_is(target, n, rng);
            record(ai, est, watch.ms());
            break;
          }
          case 1: {
            const auto est = estimate_sir(target, n, n, rng);
            record(ai, est, watch.ms());
            break;
          }
          case 2: {
            const auto est = estimate_sir_w(target, n, n, rng);
            record(ai, est, watch.ms());
            break;
          }
          case 3: {
            // The weighted variant recycles the same replicate rows, so
            // it spends no extra sampling operations.
            const auto rows = sample_independent_sir(target, n, n, rng);
            if (detail::algo_enabled(cfg, "I-SIR")) {
              const auto est = estimate_isir(rows, target);
              record(3, est, watch.ms());
            }
            if (detail::algo_enabled(cfg, "I-SIR-w")) {
              detail::StopWatch watch_w;
              const auto est = estimate_isir_w(rows, target);
              record(5, est, watch_w.ms());
            }
            break;
          }
          case 4: {
            const auto est =
                estimate_sir(target, n * n, n, rng, StaticKind::sir_2);
            record(ai, est, watch.ms());
            break;
          }
        }
      }
    }
  });

  for (std::size_t si = 0; si < cfg.sizes.size(); ++si)
    for (std::size_t ai = 0; ai < 6; ++ai)
      if (detail::algo_enabled(cfg, names[ai]))
        detail::emit_series(report, cells[si][ai]);
  return report;
}

namespace detail {

template <class State>
void record_filter_run(AlgoSeries& cell, std::size_t p,
                       const FilterRun<State>& run,
                       const std::vector<State>& truth, double wall) {
  const std::size_t t = truth.size() - 1;
  cell.sq[p].resize(t);
  for (std::size_t k = 1; k <= t; ++k)
    cell.sq[p][k - 1] = sq_norm(run.estimates[k] - truth[k]);
  cell.ess[p] = run.ess_norm_mean;
  cell.degenerate[p] = static_cast<double>(run.degenerate_steps);
  cell.ops[p] = run.sampling_ops;
  cell.wall_ms[p] = wall;
}

}  // namespace detail

/// ARCH comparison of the fully adapted filter, the optimal-first-stage
/// auxiliary filter, and the independent filter with and without the
/// second-stage reweighting; also records the mean normalized ESS of
/// the weights each estimate uses.
inline BenchReport run_arch_bench(const ExperimentConfig& cfg) {
  BenchReport report;
  report.config_hash = config_hash(cfg);
  report.config_echo = serialize_config(cfg);

  const ArchModel prior(cfg.beta0, cfg.beta1, cfg.obs_r,
                        ArchModel::Proposal::prior);
  static const char* names[4] = {"FA-APF", "APF", "I-SIR", "I-SIR-w"};

  std::vector<std::vector<detail::AlgoSeries>> cells;
  for (std::size_t si = 0; si < cfg.sizes.size(); ++si) {
    const long long n = static_cast<long long>(cfg.sizes[si]);
    std::vector<detail::AlgoSeries> row;
    row.emplace_back("arch", names[0], n, n, cfg.runs);
    row.emplace_back("arch", names[1], n, n, cfg.runs);
    row.emplace_back("arch", names[2], n, n, cfg.runs);
    row.emplace_back("arch", names[3], n, n, cfg.runs);
    cells.push_back(std::move(row));
  }

  parallel_runs(cfg.runs, cfg.effective_threads(), [&](std::size_t p) {
    RngStream data(cfg.seed, detail::run_stream_id(p, 0));
    const auto traj = simulate(prior, cfg.horizon, data);
    const auto& ys = traj.observations;

    for (std::size_t si = 0; si < cfg.sizes.size(); ++si) {
      const std::size_t n = cfg.sizes[si];
      for (std::size_t ai = 0; ai < 4; ++ai) {
        if (!detail::algo_enabled(cfg, names[ai])) {
          cells[si][ai].sq[p].assign(cfg.horizon, 0.0);
          continue;
        }
        RngStream rng(cfg.seed,
                      detail::run_stream_id(p, detail::algo_slot(si, ai)));
        detail::StopWatch watch;
        FilterRun<double> run;
        switch (ai) {
          case 0:
            run = run_fa_apf_filter(prior, ys, n, rng);
            break;
          case 1:
            run = run_apf_filter(prior, ys, n,
                                 optimal_first_stage_apf_spec(prior), rng);
            break;
          case 2:
            run = run_independent_filter(prior, ys, n, false, rng);
            break;
          case 3:
            run = run_independent_filter(prior, ys, n, true, rng);
            break;
        }
        detail::record_filter_run(cells[si][ai], p, run, traj.states,
                                  watch.ms());
      }
    }
  });

  for (auto& row : cells)
    for (std::size_t ai = 0; ai < 4; ++ai)
      if (detail::algo_enabled(cfg, names[ai]))
        detail::emit_series(report, row[ai]);
  return report;
}

/// Range-bearing tracking at a fixed budget of M^2 + M sampling
/// operations per step: the classical filter runs N = (M^2+M)/2
/// particles against the independent filter's M.
inline BenchReport run_tracking_bench(const ExperimentConfig& cfg) {
  BenchReport report;
  report.config_hash = config_hash(cfg);
  report.config_echo = serialize_config(cfg);

  const double sigma_rho =
      cfg.informative ? 0.05 : cfg.sigma_rho;
  const double sigma_theta =
      cfg.informative ? 3.14159265358979323846 / 3600.0 : cfg.sigma_theta;
  const std::string model_name =
      cfg.informative ? "tracking-informative" : "tracking";
  const RangeBearingModel model(cfg.sigma_q2, sigma_rho, sigma_theta);

  static const char* names[3] = {"SIS", "I-SIR", "I-SIR-w"};
  std::vector<std::vector<detail::AlgoSeries>> cells;
  for (std::size_t si = 0; si < cfg.sizes.size(); ++si) {
    const long long m = static_cast<long long>(cfg.sizes[si]);
    const long long n_sis = static_cast<long long>(
        cfg.budget_matched ? budget_matched_n(cfg.sizes[si]) : cfg.sizes[si]);
    std::vector<detail::AlgoSeries> row;
    row.emplace_back(model_name, names[0], n_sis, n_sis, cfg.runs);
    row.emplace_back(model_name, names[1], m, m, cfg.runs);
    row.emplace_back(model_name, names[2], m, m, cfg.runs);
    cells.push_back(std::move(row));
  }

  parallel_runs(cfg.runs, cfg.effective_threads(), [&](std::size_t p) {
    RngStream data(cfg.seed, detail::run_stream_id(p, 0));
    const auto traj = simulate(model, cfg.horizon, data);
    const auto& ys = traj.observations;

    for (std::size_t si = 0; si < cfg.sizes.size(); ++si) {
      const std::size_t m = cfg.sizes[si];
      const std::size_t n_sis =
          cfg.budget_matched ? budget_matched_n(m) : m;
      for (std::size_t ai = 0; ai < 3; ++ai) {
        if (!detail::algo_enabled(cfg, names[ai])) {
          cells[si][ai].sq[p].assign(cfg.horizon, 0.0);
          continue;
        }
        RngStream rng(cfg.seed,
                      detail::run_stream_id(p, detail::algo_slot(si, ai)));
        detail::StopWatch watch;
        FilterRun<Eigen::VectorXd> run;
        switch (ai) {
          case 0:
            run = run_sis_filter(model, ys, n_sis, ResamplePolicy::always(),
                                 rng);
            break;
          case 1:
            run = run_independent_filter(model, ys, m, false, rng);
            break;
          case 2:
            run = run_independent_filter(model, ys, m, true, rng);
            break;
        }
        detail::record_filter_run(cells[si][ai], p, run, traj.states,
                                  watch.ms());
      }
    }
  });

  for (auto& row : cells)
    for (std::size_t ai = 0; ai < 3; ++ai)
      if (detail::algo_enabled(cfg, names[ai]))
        detail::emit_series(report, row[ai]);
  return report;
}

/// Budget-matched sweep over the state dimension m = 4, 8, ... with the
/// Kalman filter alongside as the exact reference.
inline BenchReport run_highdim_bench(const ExperimentConfig& cfg) {
  BenchReport report;
  report.config_hash = config_hash(cfg);
  report.config_echo = serialize_config(cfg);

  static const char* names[4] = {"SIS", "I-SIR", "I-SIR-w", "KF"};
  for (int m_dim : cfg.dims)
    if (m_dim < 4 || m_dim % 4 != 0)
      throw ConfigError("dims must be positive multiples of 4");

  for (std::size_t di = 0; di < cfg.dims.size(); ++di) {
    const int m_dim = cfg.dims[di];
    const auto model = make_highdim_model(m_dim / 4, cfg.hd_sigma_q2,
                                          cfg.hd_sigma_x2, cfg.hd_sigma_y2);
    const std::string model_name = "highdim-m" + std::to_string(m_dim);

    for (std::size_t si = 0; si < cfg.sizes.size(); ++si) {
      const std::size_t m = cfg.sizes[si];
      const std::size_t n_sis =
          cfg.budget_matched ? budget_matched_n(m) : m;
      std::vector<detail::AlgoSeries> cells;
      cells.emplace_back(model_name, names[0],
                         static_cast<long long>(n_sis),
                         static_cast<long long>(n_sis), cfg.runs);
      cells.emplace_back(model_name, names[1], static_cast<long long>(m),
                         static_cast<long long>(m), cfg.runs);
      cells.emplace_back(model_name, names[2], static_cast<long long>(m),
                         static_cast<long long>(m), cfg.runs);
      cells.emplace_back(model_name, names[3], 0, 0, cfg.runs);

      parallel_runs(cfg.runs, cfg.effective_threads(), [&](std::size_t p) {
        RngStream data(cfg.seed, detail::run_stream_id(p, 512 + di));
        const auto traj = simulate(model, cfg.horizon, data);
        const auto& ys = traj.observations;

        for (std::size_t ai = 0; ai < 4; ++ai) {
          if (!detail::algo_enabled(cfg, names[ai])) {
            cells[ai].sq[p].assign(cfg.horizon, 0.0);
            continue;
          }
          RngStream rng(
              cfg.seed,
              detail::run_stream_id(
                  p, detail::algo_slot(di * cfg.sizes.size() + si, ai)));
          detail::StopWatch watch;
          if (ai == 3) {
            const auto kf = kalman_filter(model, ys);
            auto& cell = cells[ai];
            cell.sq[p].resize(cfg.horizon);
            for (std::size_t k = 1; k <= cfg.horizon; ++k)
              cell.sq[p][k - 1] = (kf.means[k] - traj.states[k]).squaredNorm();
            cell.wall_ms[p] = watch.ms();
            continue;
          }
          FilterRun<Eigen::VectorXd> run;
          switch (ai) {
            case 0:
              run = run_sis_filter(model, ys, n_sis,
                                   ResamplePolicy::always(), rng);
              break;
            case 1:
              run = run_independent_filter(model, ys, m, false, rng);
              break;
            case 2:
              run = run_independent_filter(model, ys, m, true, rng);
              break;
          }
          detail::record_filter_run(cells[ai], p, run, traj.states,
                                    watch.ms());
        }
      });

      for (std::size_t ai = 0; ai < 4; ++ai)
        if (detail::algo_enabled(cfg, names[ai]))
          detail::emit_series(report, cells[ai]);
    }
  }
  return report;
}

}  // namespace smcir
