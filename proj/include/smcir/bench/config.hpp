#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace smcir {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One benchmark campaign.  `sizes` holds the final sample counts N
/// (static/arch) or M (tracking/highdim); `dims` the state dimensions
/// of the high-dimensional sweep.  With `budget_matched` the classical
/// baseline gets N = (M^2 + M) / 2 particles so every algorithm spends
/// M^2 + M sampling operations per step.
struct ExperimentConfig {
  std::string model = "static";
  std::vector<std::string> algos;  // empty selects every algorithm
  std::vector<std::size_t> sizes{20, 40, 60, 80, 100};
  std::vector<int> dims{4, 8, 16, 32};
  std::size_t runs = 1000;
  std::size_t horizon = 50;
  std::uint64_t seed = 1;
  bool budget_matched = true;
  bool informative = false;
  unsigned threads = 0;  // 0 = hardware concurrency
  std::string out;       // empty writes to stdout
  std::string format = "csv";

  double sigma_x2 = 10.0;
  double sigma_y2 = 3.0;
  double beta0 = 3.0;
  double beta1 = 0.75;
  double obs_r = 1.0;
  double sigma_q2 = 10.0;
  double sigma_rho = 0.25;
  double sigma_theta = 3.14159265358979323846 / 720.0;
  double hd_sigma_q2 = 25.0;
  double hd_sigma_x2 = 4.0;
  double hd_sigma_y2 = 4.0;

  unsigned effective_threads() const {
    if (threads > 0) return threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
  }
};

/// Equal-budget particle count for the classical baseline.
inline std::size_t budget_matched_n(std::size_t m) {
  return (m * m + m) / 2;
}

namespace detail {

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw ConfigError("bad boolean for " + key + ": " + v);
}

}  // namespace detail

/// Apply one `key=value` setting.  Unknown keys are errors.
inline void apply_config_entry(ExperimentConfig& cfg, const std::string& key,
                               const std::string& value) {
  try {
    if (key == "schema") {
      if (value != "1") throw ConfigError("unsupported schema: " + value);
    } else if (key == "model") {
      cfg.model = value;
    } else if (key == "algos") {
      cfg.algos = detail::split_list(value);
    } else if (key == "sizes" || key == "particles") {
      cfg.sizes.clear();
      for (const auto& v : detail::split_list(value))
        cfg.sizes.push_back(static_cast<std::size_t>(std::stoull(v)));
      if (cfg.sizes.empty()) throw ConfigError("empty size list");
    } else if (key == "dims") {
      cfg.dims.clear();
      for (const auto& v : detail::split_list(value))
        cfg.dims.push_back(std::stoi(v));
    } else if (key == "runs") {
      cfg.runs = static_cast<std::size_t>(std::stoull(value));
    } else if (key == "horizon") {
      cfg.horizon = static_cast<std::size_t>(std::stoull(value));
    } else if (key == "seed") {
      cfg.seed = std::stoull(value);
    } else if (key == "budget_matched") {
      cfg.budget_matched = detail::parse_bool(value, key);
    } else if (key == "informative") {
      cfg.informative = detail::parse_bool(value, key);
    } else if (key == "threads") {
      cfg.threads = static_cast<unsigned>(std::stoul(value));
    } else if (key == "out") {
      cfg.out = value;
    } else if (key == "format") {
      if (value != "csv" && value != "json")
        throw ConfigError("format must be csv or json");
      cfg.format = value;
    } else if (key == "sigma_x2") {
      cfg.sigma_x2 = std::stod(value);
    } else if (key == "sigma_y2") {
      cfg.sigma_y2 = std::stod(value);
    } else if (key == "beta0") {
      cfg.beta0 = std::stod(value);
    } else if (key == "beta1") {
      cfg.beta1 = std::stod(value);
    } else if (key == "obs_r") {
      cfg.obs_r = std::stod(value);
    } else if (key == "sigma_q2") {
      cfg.sigma_q2 = std::stod(value);
    } else if (key == "sigma_rho") {
      cfg.sigma_rho = std::stod(value);
    } else if (key == "sigma_theta") {
      cfg.sigma_theta = std::stod(value);
    } else if (key == "hd_sigma_q2") {
      cfg.hd_sigma_q2 = std::stod(value);
    } else if (key == "hd_sigma_x2") {
      cfg.hd_sigma_x2 = std::stod(value);
    } else if (key == "hd_sigma_y2") {
      cfg.hd_sigma_y2 = std::stod(value);
    } else {
      throw ConfigError("unknown config key: " + key);
    }
  } catch (const std::invalid_argument&) {
    throw ConfigError("bad value for " + key + ": " + value);
  } catch (const std::out_of_range&) {
    throw ConfigError("bad value for " + key + ": " + value);
  }
}

/// Flat key=value file, '#' comments, versioned by a `schema=1` entry.
inline void load_config_file(ExperimentConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected key=value");
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    auto trim = [](std::string& s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      s = (b == std::string::npos) ? std::string() : s.substr(b, e - b + 1);
    };
    trim(key);
    trim(value);
    apply_config_entry(cfg, key, value);
  }
}

/// Canonical serialization used for hashing and for the config echo in
/// reports.
inline std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out.precision(17);
  out << "schema=1\nmodel=" << cfg.model << "\nalgos=";
  for (std::size_t i = 0; i < cfg.algos.size(); ++i)
    out << (i ? "," : "") << cfg.algos[i];
  out << "\nsizes=";
  for (std::size_t i = 0; i < cfg.sizes.size(); ++i)
    out << (i ? "," : "") << cfg.sizes[i];
  out << "\ndims=";
  for (std::size_t i = 0; i < cfg.dims.size(); ++i)
    out << (i ? "," : "") << cfg.dims[i];
  out << "\nruns=" << cfg.runs << "\nhorizon=" << cfg.horizon
      << "\nseed=" << cfg.seed << "\nbudget_matched=" << cfg.budget_matched
      << "\ninformative=" << cfg.informative << "\nsigma_x2=" << cfg.sigma_x2
      << "\nsigma_y2=" << cfg.sigma_y2 << "\nbeta0=" << cfg.beta0
      << "\nbeta1=" << cfg.beta1 << "\nobs_r=" << cfg.obs_r
      << "\nsigma_q2=" << cfg.sigma_q2 << "\nsigma_rho=" << cfg.sigma_rho
      << "\nsigma_theta=" << cfg.sigma_theta
      << "\nhd_sigma_q2=" << cfg.hd_sigma_q2
      << "\nhd_sigma_x2=" << cfg.hd_sigma_x2
      << "\nhd_sigma_y2=" << cfg.hd_sigma_y2 << "\n";
  return out.str();
}

/// FNV-1a over the canonical serialization; reports carry it so a row
/// can be traced back to the exact configuration.
inline std::uint64_t config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : serialize_config(cfg)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace smcir
