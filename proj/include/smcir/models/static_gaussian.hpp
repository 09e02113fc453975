#pragma once

#include <cmath>
#include <stdexcept>

#include "smcir/gaussian.hpp"
#include "smcir/static_estimators.hpp"

namespace smcir {

/// Scalar conjugate-Gaussian problem: prior N(0, sigma_x2), likelihood
/// N(y; x, sigma_y2), proposal equal to the prior, f(x) = x.  The
/// posterior is Gaussian with mean y*sigma_x2/(sigma_x2+sigma_y2) and
/// variance 1/(1/sigma_x2 + 1/sigma_y2), which the tests use as ground
/// truth.
inline StaticTarget static_gaussian_target(double sigma_x2, double sigma_y2,
                                           double y) {
  if (sigma_x2 <= 0.0 || sigma_y2 <= 0.0)
    throw std::invalid_argument("variances must be positive");
  StaticTarget t;
  const double sx = std::sqrt(sigma_x2);
  t.log_target_u = [=](double x) {
    return normal_logpdf(x, 0.0, sigma_x2) + normal_logpdf(y, x, sigma_y2);
  };
  t.sample_proposal = [=](RngStream& rng) { return sx * rng.normal(); };
  t.log_proposal = [=](double x) { return normal_logpdf(x, 0.0, sigma_x2); };
  t.f = [](double x) { return x; };
  // p_u / q collapses to the likelihood term.
  t.log_ratio = [=](double x) { return normal_logpdf(y, x, sigma_y2); };
  return t;
}

inline double static_gaussian_posterior_mean(double sigma_x2, double sigma_y2,
                                             double y) {
  return y * sigma_x2 / (sigma_x2 + sigma_y2);
}

inline double static_gaussian_posterior_var(double sigma_x2, double sigma_y2) {
  return 1.0 / (1.0 / sigma_x2 + 1.0 / sigma_y2);
}

}  // namespace smcir
