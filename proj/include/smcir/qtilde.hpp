#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace smcir {

struct SupportTooLarge : std::runtime_error {
  SupportTooLarge()
      : std::runtime_error(
            "discrete enumeration exceeds the 1e6 tuple guard") {}
};

/// Exact compound density of one resampled atom on a finite support.
///
/// A sample-weight-resample round with N proposals draws the surviving
/// atom from qtilde_N(x) = N * h_N(x) * q(x), where h_N(x) is the
/// expected normalized weight of a candidate pinned at x against N-1
/// i.i.d. co-candidates from q.  This enumerates all |S|^(N-1)
/// co-candidate tuples, so it only works for toy supports; it is the
/// ground truth the sampling paths are tested against.
///
/// `p` may be unnormalized; `q` must be a probability vector.
inline std::vector<double> qtilde_exact_discrete(std::span<const double> p,
                                                 std::span<const double> q,
                                                 std::size_t n) {
  if (p.size() != q.size() || p.empty())
    throw std::invalid_argument("pmf size mismatch");
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  const std::size_t s = p.size();

  double tuples = 1.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    tuples *= static_cast<double>(s);
    if (tuples > 1e6) throw SupportTooLarge();
  }

  // Importance ratios r = p/q on the support of q.  The h_N integrand
  // is scale-invariant in r, so p need not be normalized.
  std::vector<double> ratio(s, 0.0);
  for (std::size_t i = 0; i < s; ++i) {
    if (q[i] > 0.0) ratio[i] = p[i] / q[i];
  }

  std::vector<double> qt(s, 0.0);
  std::vector<std::size_t> tuple(n - 1, 0);
  for (std::size_t x = 0; x < s; ++x) {
    if (q[x] <= 0.0) continue;
    const double rx = ratio[x];
    double h = 0.0;
    std::fill(tuple.begin(), tuple.end(), 0);
    while (true) {
      double prob = 1.0;
      double rsum = rx;
      for (std::size_t k = 0; k + 1 < n; ++k) {
        prob *= q[tuple[k]];
        rsum += ratio[tuple[k]];
      }
      if (prob > 0.0 && rsum > 0.0) h += prob * (rx / rsum);
      // odometer over the (n-1)-tuple
      std::size_t k = 0;
      for (; k + 1 < n; ++k) {
        if (++tuple[k] < s) break;
        tuple[k] = 0;
      }
      if (k + 1 >= n) break;
    }
    qt[x] = static_cast<double>(n) * h * q[x];
  }
  return qt;
}

}  // namespace smcir
