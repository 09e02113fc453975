#pragma once

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "smcir/gaussian.hpp"
#include "smcir/models/linear_gaussian.hpp"
#include "smcir/rng.hpp"

namespace smcir {

/// Wrap an angle difference to (-pi, pi].
inline double wrap_angle(double a) {
  const double two_pi = 2.0 * 3.14159265358979323846;
  double w = std::fmod(a + 3.14159265358979323846, two_pi);
  if (w <= 0.0) w += two_pi;
  return w - 3.14159265358979323846;
}

/// Planar constant-velocity target observed through noisy range and
/// bearing.  The bearing is the full-quadrant atan2(py, px) and
/// likelihood residuals are wrapped to (-pi, pi], so the density is
/// invariant to adding 2*pi to a measured bearing.  Proposal is the
/// transition (bootstrap).
class RangeBearingModel {
 public:
  using State = Eigen::VectorXd;  // (px, vx, py, vy)
  using Obs = Eigen::VectorXd;    // (range, bearing)

  RangeBearingModel(double sigma_q2, double sigma_rho, double sigma_theta)
      : sigma_rho2_(sigma_rho * sigma_rho),
        sigma_theta2_(sigma_theta * sigma_theta),
        f_(constant_velocity_fq(sigma_q2).first),
        trans_(constant_velocity_fq(sigma_q2).second),
        init_(block_init_cov(1)) {
    if (sigma_rho <= 0.0 || sigma_theta <= 0.0)
      throw std::invalid_argument("measurement noise must be positive");
  }

  Obs measurement(const State& x) const {
    Obs y(2);
    y(0) = std::hypot(x(0), x(2));
    y(1) = std::atan2(x(2), x(0));
    return y;
  }

  State init_sample(RngStream& rng) const {
    return init_.sample(Eigen::VectorXd::Zero(4), rng);
  }
  double init_logpdf(const State& x) const {
    return init_.logpdf(x, Eigen::VectorXd::Zero(4));
  }

  State transition_sample(const State& x_prev, RngStream& rng) const {
    return trans_.sample(f_ * x_prev, rng);
  }
  double transition_logpdf(const State& x, const State& x_prev) const {
    return trans_.logpdf(x, f_ * x_prev);
  }

  double likelihood_logpdf(const Obs& y, const State& x) const {
    const Obs h = measurement(x);
    return normal_logpdf(y(0) - h(0), 0.0, sigma_rho2_) +
           normal_logpdf(wrap_angle(y(1) - h(1)), 0.0, sigma_theta2_);
  }
  Obs sample_obs(const State& x, RngStream& rng) const {
    Obs y = measurement(x);
    y(0) += std::sqrt(sigma_rho2_) * rng.normal();
    y(1) = wrap_angle(y(1) + std::sqrt(sigma_theta2_) * rng.normal());
    return y;
  }

  State proposal_sample(const State& x_prev, const Obs&, RngStream& rng) const {
    return transition_sample(x_prev, rng);
  }
  double proposal_logpdf(const State& x, const State& x_prev,
                         const Obs&) const {
    return transition_logpdf(x, x_prev);
  }

 private:
  double sigma_rho2_;
  double sigma_theta2_;
  Eigen::Matrix4d f_;
  MvnDensity trans_;
  MvnDensity init_;
};

}  // namespace smcir
