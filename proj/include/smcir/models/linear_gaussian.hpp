#pragma once

#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

#include "smcir/gaussian.hpp"
#include "smcir/rng.hpp"

namespace smcir {

/// Linear-Gaussian state-space model
///   x_k = F x_{k-1} + u_k,  u_k ~ N(0, Q)
///   y_k = H x_k     + v_k,  v_k ~ N(0, R)
/// with Gaussian initial law.  Q and R must be positive definite.  The
/// predictive likelihood and optimal conditional proposal are Gaussian
/// and precomputed at construction; the default particle proposal is
/// the transition.
class LinearGaussianSsm {
 public:
  using State = Eigen::VectorXd;
  using Obs = Eigen::VectorXd;

  LinearGaussianSsm(Eigen::MatrixXd f, Eigen::MatrixXd q, Eigen::MatrixXd h,
                    Eigen::MatrixXd r, Eigen::VectorXd init_mean,
                    Eigen::MatrixXd init_cov)
      : f_(std::move(f)),
        h_(std::move(h)),
        init_mean_(std::move(init_mean)),
        trans_(std::move(q)),
        meas_(std::move(r)),
        init_(std::move(init_cov)),
        pred_(h_ * trans_.cov() * h_.transpose() + meas_.cov()),
        opt_gain_(trans_.cov() * h_.transpose() * pred_.cov().inverse()),
        // Joseph form keeps the conditional covariance positive
        // definite even for nearly singular Q.
        opt_([&] {
          const Eigen::MatrixXd a =
              Eigen::MatrixXd::Identity(f_.rows(), f_.rows()) -
              opt_gain_ * h_;
          return MvnDensity(a * trans_.cov() * a.transpose() +
                            opt_gain_ * meas_.cov() * opt_gain_.transpose());
        }()) {
    if (f_.rows() != f_.cols() || f_.rows() != trans_.dim() ||
        h_.cols() != f_.rows() || h_.rows() != meas_.dim() ||
        init_mean_.size() != f_.rows())
      throw std::invalid_argument("inconsistent model dimensions");
  }

  Eigen::Index dim_x() const { return f_.rows(); }
  Eigen::Index dim_y() const { return h_.rows(); }
  const Eigen::MatrixXd& f_matrix() const { return f_; }
  const Eigen::MatrixXd& q_matrix() const { return trans_.cov(); }
  const Eigen::MatrixXd& h_matrix() const { return h_; }
  const Eigen::MatrixXd& r_matrix() const { return meas_.cov(); }
  const Eigen::VectorXd& init_mean() const { return init_mean_; }
  const Eigen::MatrixXd& init_cov() const { return init_.cov(); }

  State init_sample(RngStream& rng) const {
    return init_.sample(init_mean_, rng);
  }
  double init_logpdf(const State& x) const {
    return init_.logpdf(x, init_mean_);
  }

  State transition_sample(const State& x_prev, RngStream& rng) const {
    return trans_.sample(f_ * x_prev, rng);
  }
  double transition_logpdf(const State& x, const State& x_prev) const {
    return trans_.logpdf(x, f_ * x_prev);
  }

  double likelihood_logpdf(const Obs& y, const State& x) const {
    return meas_.logpdf(y, h_ * x);
  }
  Obs sample_obs(const State& x, RngStream& rng) const {
    return meas_.sample(h_ * x, rng);
  }

  double predictive_loglik(const Obs& y, const State& x_prev) const {
    return pred_.logpdf(y, h_ * (f_ * x_prev));
  }

  State optimal_proposal_sample(const State& x_prev, const Obs& y,
                                RngStream& rng) const {
    return opt_.sample(optimal_mean(x_prev, y), rng);
  }
  double optimal_proposal_logpdf(const State& x, const State& x_prev,
                                 const Obs& y) const {
    return opt_.logpdf(x, optimal_mean(x_prev, y));
  }

  State proposal_sample(const State& x_prev, const Obs&, RngStream& rng) const {
    return transition_sample(x_prev, rng);
  }
  double proposal_logpdf(const State& x, const State& x_prev,
                         const Obs&) const {
    return transition_logpdf(x, x_prev);
  }

 private:
  Eigen::VectorXd optimal_mean(const State& x_prev, const Obs& y) const {
    const Eigen::VectorXd pred = f_ * x_prev;
    return pred + opt_gain_ * (y - h_ * pred);
  }

  Eigen::MatrixXd f_;
  Eigen::MatrixXd h_;
  Eigen::VectorXd init_mean_;
  MvnDensity trans_;
  MvnDensity meas_;
  MvnDensity init_;
  MvnDensity pred_;
  Eigen::MatrixXd opt_gain_;
  MvnDensity opt_;
};

/// Constant-velocity kinematics for one planar block, unit time step:
/// state (px, vx, py, vy), white-noise acceleration of intensity
/// sigma_q2.
inline std::pair<Eigen::Matrix4d, Eigen::Matrix4d> constant_velocity_fq(
    double sigma_q2) {
  Eigen::Matrix4d f = Eigen::Matrix4d::Identity();
  f(0, 1) = 1.0;
  f(2, 3) = 1.0;
  Eigen::Matrix4d q = Eigen::Matrix4d::Zero();
  const double t3 = 1.0 / 3.0, t2 = 0.5;
  q(0, 0) = t3;
  q(0, 1) = t2;
  q(1, 0) = t2;
  q(1, 1) = 1.0;
  q(2, 2) = t3;
  q(2, 3) = t2;
  q(3, 2) = t2;
  q(3, 3) = 1.0;
  return {f, sigma_q2 * q};
}

/// Initial covariance diag(100, 1, 100, 1) repeated per planar block.
inline Eigen::MatrixXd block_init_cov(int blocks) {
  Eigen::VectorXd d(4 * blocks);
  for (int b = 0; b < blocks; ++b) {
    d(4 * b + 0) = 100.0;
    d(4 * b + 1) = 1.0;
    d(4 * b + 2) = 100.0;
    d(4 * b + 3) = 1.0;
  }
  return d.asDiagonal();
}

/// The high-dimensional benchmark family: `blocks` independent planar
/// constant-velocity components (state dimension m = 4 * blocks), each
/// observed in position through H = [e1, e3] with independent noise.
inline LinearGaussianSsm make_highdim_model(int blocks, double sigma_q2 = 25.0,
                                            double sigma_x2 = 4.0,
                                            double sigma_y2 = 4.0) {
  if (blocks < 1) throw std::invalid_argument("blocks must be >= 1");
  const int m = 4 * blocks;
  const int n = 2 * blocks;
  const auto [fb, qb] = constant_velocity_fq(sigma_q2);
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(m, m);
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(m, m);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, m);
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, n);
  for (int b = 0; b < blocks; ++b) {
    f.block<4, 4>(4 * b, 4 * b) = fb;
    q.block<4, 4>(4 * b, 4 * b) = qb;
    h(2 * b, 4 * b) = 1.0;
    h(2 * b + 1, 4 * b + 2) = 1.0;
    r(2 * b, 2 * b) = sigma_x2;
    r(2 * b + 1, 2 * b + 1) = sigma_y2;
  }
  return LinearGaussianSsm(f, q, h, r, Eigen::VectorXd::Zero(m),
                           block_init_cov(blocks));
}

}  // namespace smcir
