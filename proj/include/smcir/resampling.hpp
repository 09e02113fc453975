#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "smcir/rng.hpp"

namespace smcir {

/// One categorical draw by inverse CDF on a single uniform variate.
/// Zero-probability entries are never selected.
inline std::size_t categorical_draw(std::span<const double> w, RngStream& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  std::size_t last_pos = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] <= 0.0) continue;
    acc += w[i];
    last_pos = i;
    if (u < acc) return i;
  }
  // u landed in the rounding gap behind the last positive entry.
  return last_pos;
}

/// M i.i.d. categorical draws (multinomial resampling).  The index
/// sequence itself is i.i.d. -- no stratification -- as required for
/// the independence constructions built on top of it.
inline std::vector<std::size_t> multinomial_resample(std::span<const double> w,
                                                     std::size_t m,
                                                     RngStream& rng) {
  std::vector<double> cdf(w.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    acc += w[i];
    cdf[i] = acc;
  }
  std::size_t last_pos = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] > 0.0) last_pos = i;
  }
  std::vector<std::size_t> idx(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double u = rng.uniform() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    std::size_t i = static_cast<std::size_t>(it - cdf.begin());
    if (i >= w.size()) i = last_pos;
    // upper_bound may land on a zero-mass slot when u hits its left
    // edge exactly; advance to the next positive entry.
    while (i < w.size() && w[i] <= 0.0) ++i;
    idx[k] = (i >= w.size()) ? last_pos : i;
  }
  return idx;
}

}  // namespace smcir
