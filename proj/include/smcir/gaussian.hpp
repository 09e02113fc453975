#pragma once

#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "smcir/rng.hpp"

namespace smcir {

inline constexpr double log_two_pi = 1.8378770664093454836;

/// log N(x; mean, var), var > 0.
inline double normal_logpdf(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * (log_two_pi + std::log(var) + d * d / var);
}

struct CovarianceNotPd : std::runtime_error {
  CovarianceNotPd() : std::runtime_error("covariance is not positive definite") {}
};

/// Gaussian kernel with a fixed covariance and movable mean; the
/// Cholesky factor is computed once at construction.
class MvnDensity {
 public:
  explicit MvnDensity(Eigen::MatrixXd cov) : cov_(std::move(cov)) {
    llt_.compute(cov_);
    if (llt_.info() != Eigen::Success) throw CovarianceNotPd();
    const auto& l = llt_.matrixL();
    log_det_ = 0.0;
    for (Eigen::Index i = 0; i < cov_.rows(); ++i)
      log_det_ += 2.0 * std::log(l(i, i));
  }

  Eigen::Index dim() const { return cov_.rows(); }
  const Eigen::MatrixXd& cov() const { return cov_; }

  Eigen::VectorXd sample(const Eigen::VectorXd& mean, RngStream& rng) const {
    Eigen::VectorXd z(dim());
    for (Eigen::Index i = 0; i < dim(); ++i) z(i) = rng.normal();
    return mean + llt_.matrixL() * z;
  }

  double logpdf(const Eigen::VectorXd& x, const Eigen::VectorXd& mean) const {
    Eigen::VectorXd r = x - mean;
    llt_.matrixL().solveInPlace(r);
    return -0.5 * (dim() * log_two_pi + log_det_ + r.squaredNorm());
  }

 private:
  Eigen::MatrixXd cov_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double log_det_ = 0.0;
};

}  // namespace smcir
