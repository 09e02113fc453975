#pragma once

#include <span>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "smcir/gaussian.hpp"
#include "smcir/models/linear_gaussian.hpp"

namespace smcir {

struct KalmanResult {
  std::vector<Eigen::VectorXd> means;  // E(x_k | y_{0:k})
  std::vector<Eigen::MatrixXd> covs;   // cov(x_k | y_{0:k})
};

/// Exact filtering recursion for a linear-Gaussian model; the oracle
/// the particle estimates are judged against.  y_0 updates the initial
/// prior directly, predictions start at k = 1.
inline KalmanResult kalman_filter(const LinearGaussianSsm& model,
                                  std::span<const Eigen::VectorXd> ys) {
  const auto& f = model.f_matrix();
  const auto& q = model.q_matrix();
  const auto& h = model.h_matrix();
  const auto& r = model.r_matrix();

  KalmanResult out;
  out.means.reserve(ys.size());
  out.covs.reserve(ys.size());

  Eigen::VectorXd mean = model.init_mean();
  Eigen::MatrixXd cov = model.init_cov();
  for (std::size_t k = 0; k < ys.size(); ++k) {
    if (k > 0) {
      mean = f * mean;
      cov = f * cov * f.transpose() + q;
    }
    const Eigen::MatrixXd s = h * cov * h.transpose() + r;
    Eigen::LLT<Eigen::MatrixXd> llt(s);
    if (llt.info() != Eigen::Success) throw CovarianceNotPd();
    const Eigen::MatrixXd gain = llt.solve(h * cov).transpose();
    mean += gain * (ys[k] - h * mean);
    cov = cov - gain * h * cov;
    cov = 0.5 * (cov + cov.transpose()).eval();
    if (cov.diagonal().minCoeff() < -1e-9) throw CovarianceNotPd();
    out.means.push_back(mean);
    out.covs.push_back(cov);
  }
  return out;
}

}  // namespace smcir
