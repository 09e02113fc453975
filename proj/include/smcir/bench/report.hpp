#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include <json.hpp>

#include "smcir/bench/config.hpp"

namespace smcir {

struct ShapeMismatch : std::runtime_error {
  ShapeMismatch() : std::runtime_error("estimate/truth shapes differ") {}
};

inline double sq_norm(double v) { return v * v; }
inline double sq_norm(const Eigen::VectorXd& v) { return v.squaredNorm(); }

/// Time-averaged RMSE over per-run squared errors:
/// (1/T) sum_k sqrt((1/P) sum_p e[p][k]).
inline double rmse_from_sq(std::span<const std::vector<double>> sq_err) {
  if (sq_err.empty()) throw ShapeMismatch();
  const std::size_t t = sq_err.front().size();
  if (t == 0) throw ShapeMismatch();
  for (const auto& row : sq_err)
    if (row.size() != t) throw ShapeMismatch();
  double acc = 0.0;
  for (std::size_t k = 0; k < t; ++k) {
    double s = 0.0;
    for (const auto& row : sq_err) s += row[k];
    acc += std::sqrt(s / static_cast<double>(sq_err.size()));
  }
  return acc / static_cast<double>(t);
}

/// Same criterion from estimate/truth series (P runs by T steps).
template <class State>
double rmse(std::span<const std::vector<State>> estimates,
            std::span<const std::vector<State>> truths) {
  if (estimates.size() != truths.size() || estimates.empty())
    throw ShapeMismatch();
  std::vector<std::vector<double>> sq(estimates.size());
  for (std::size_t p = 0; p < estimates.size(); ++p) {
    if (estimates[p].size() != truths[p].size()) throw ShapeMismatch();
    sq[p].resize(estimates[p].size());
    for (std::size_t k = 0; k < estimates[p].size(); ++k)
      sq[p][k] = sq_norm(estimates[p][k] - truths[p][k]);
  }
  return rmse_from_sq(sq);
}

/// Per-run reduction of the same criterion (the P = 1 case).
inline double rmse_single_run(std::span<const double> sq_err) {
  double acc = 0.0;
  for (double e : sq_err) acc += std::sqrt(e);
  return acc / static_cast<double>(sq_err.size());
}

/// One report entry; `run` is -1 for campaign-level aggregates.
struct ReportRow {
  std::string model;
  std::string algo;
  long long n = 0;
  long long m = 0;
  long long run = -1;
  std::string metric;
  double value = 0.0;
};

struct BenchReport {
  std::vector<ReportRow> rows;
  std::uint64_t config_hash = 0;
  std::string config_echo;
};

namespace detail {

inline std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

/// Canonical CSV: a comment line carrying the config hash, then the
/// fixed header and one row per entry.
inline void write_csv(const BenchReport& report, std::ostream& out) {
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(report.config_hash));
  out << "# config_hash=" << hash << "\n";
  out << "model,algo,N,M,run,metric,value\n";
  for (const auto& r : report.rows) {
    out << r.model << ',' << r.algo << ',' << r.n << ',' << r.m << ','
        << r.run << ',' << r.metric << ',' << detail::format_value(r.value)
        << "\n";
  }
}

/// JSON mirror of the CSV rows plus the config echo.
inline void write_json(const BenchReport& report, std::ostream& out) {
  nlohmann::json j;
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(report.config_hash));
  j["schema"] = 1;
  j["config_hash"] = hash;
  j["config"] = report.config_echo;
  j["rows"] = nlohmann::json::array();
  for (const auto& r : report.rows) {
    j["rows"].push_back({{"model", r.model},
                         {"algo", r.algo},
                         {"N", r.n},
                         {"M", r.m},
                         {"run", r.run},
                         {"metric", r.metric},
                         {"value", r.value}});
  }
  out << j.dump(2) << "\n";
}

}  // namespace smcir
