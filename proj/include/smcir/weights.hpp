#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace smcir {

/// Log-domain unnormalized weights.  Entries may be -inf (zero mass)
/// but never NaN.
using LogWeights = std::vector<double>;

/// Every weight is -inf: the whole target mass vanished under the
/// proposal draws.  Callers decide the fallback (estimators propagate,
/// filters substitute uniform weights and raise a per-step flag).
struct AllWeightsDegenerate : std::runtime_error {
  AllWeightsDegenerate() : std::runtime_error("all log-weights are -inf") {}
};

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

inline double log_sum_exp(std::span<const double> lw) {
  double m = neg_inf;
  for (double v : lw) m = std::max(m, v);
  if (m == neg_inf) return neg_inf;
  double s = 0.0;
  for (double v : lw) s += std::exp(v - m);
  return m + std::log(s);
}

inline double log_add_exp(double a, double b) {
  if (a == neg_inf) return b;
  if (b == neg_inf) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

/// Normalized importance weights w_i = exp(lw_i - logsumexp(lw)).
/// The result sums to 1 within 1e-12.
inline std::vector<double> normalize_log_weights(std::span<const double> lw) {
  double m = neg_inf;
  for (double v : lw) {
    if (std::isnan(v)) throw std::invalid_argument("NaN log-weight");
    m = std::max(m, v);
  }
  if (m == neg_inf) throw AllWeightsDegenerate();
  std::vector<double> w(lw.size());
  double s = 0.0;
  for (std::size_t i = 0; i < lw.size(); ++i) {
    w[i] = std::exp(lw[i] - m);
    s += w[i];
  }
  const double inv = 1.0 / s;
  for (double& v : w) v *= inv;
  return w;
}

/// Kish effective sample size 1 / sum(w_i^2); lies in [1, N] for a
/// probability vector of length N.
inline double effective_sample_size(std::span<const double> w) {
  double s2 = 0.0;
  for (double v : w) s2 += v * v;
  return 1.0 / s2;
}

/// ESS / N, in (0, 1].
inline double normalized_ess(std::span<const double> w) {
  return effective_sample_size(w) / static_cast<double>(w.size());
}

}  // namespace smcir
