#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include "smcir/gaussian.hpp"
#include "smcir/rng.hpp"

namespace smcir {

/// Scalar ARCH state-space model:
///   x_k | x_{k-1} ~ N(0, beta0 + beta1 * x_{k-1}^2)
///   y_k | x_k     ~ N(x_k, obs_var)
///   x_0           ~ N(0, beta0)
/// Both the predictive likelihood and the optimal conditional proposal
/// are available in closed form, so the fully adapted filter runs on
/// this model.  The particle proposal is selectable: the transition
/// (bootstrap) or the optimal conditional law.
class ArchModel {
 public:
  using State = double;
  using Obs = double;

  enum class Proposal { prior, optimal };

  ArchModel(double beta0, double beta1, double obs_var,
            Proposal proposal = Proposal::prior)
      : beta0_(beta0), beta1_(beta1), obs_var_(obs_var), proposal_(proposal) {
    if (beta0 <= 0.0 || beta1 <= 0.0 || obs_var <= 0.0)
      throw std::invalid_argument("ARCH parameters must be positive");
  }

  double beta0() const { return beta0_; }
  double beta1() const { return beta1_; }
  double obs_var() const { return obs_var_; }
  Proposal proposal() const { return proposal_; }

  double transition_var(double x_prev) const {
    return beta0_ + beta1_ * x_prev * x_prev;
  }

  State init_sample(RngStream& rng) const {
    return std::sqrt(beta0_) * rng.normal();
  }
  double init_logpdf(State x) const { return normal_logpdf(x, 0.0, beta0_); }

  State transition_sample(State x_prev, RngStream& rng) const {
    return std::sqrt(transition_var(x_prev)) * rng.normal();
  }
  double transition_logpdf(State x, State x_prev) const {
    return normal_logpdf(x, 0.0, transition_var(x_prev));
  }

  double likelihood_logpdf(Obs y, State x) const {
    return normal_logpdf(y, x, obs_var_);
  }
  Obs sample_obs(State x, RngStream& rng) const {
    return x + std::sqrt(obs_var_) * rng.normal();
  }

  double predictive_loglik(Obs y, State x_prev) const {
    return normal_logpdf(y, 0.0, obs_var_ + transition_var(x_prev));
  }

  /// Mean and variance of p(x_k | x_{k-1}, y_k).
  std::pair<double, double> optimal_moments(State x_prev, Obs y) const {
    const double v = transition_var(x_prev);
    const double s = obs_var_ + v;
    return {v / s * y, obs_var_ * v / s};
  }

  State optimal_proposal_sample(State x_prev, Obs y, RngStream& rng) const {
    const auto [mean, var] = optimal_moments(x_prev, y);
    return mean + std::sqrt(var) * rng.normal();
  }
  double optimal_proposal_logpdf(State x, State x_prev, Obs y) const {
    const auto [mean, var] = optimal_moments(x_prev, y);
    return normal_logpdf(x, mean, var);
  }

  State proposal_sample(State x_prev, Obs y, RngStream& rng) const {
    return proposal_ == Proposal::prior
               ? transition_sample(x_prev, rng)
               : optimal_proposal_sample(x_prev, y, rng);
  }
  double proposal_logpdf(State x, State x_prev, Obs y) const {
    return proposal_ == Proposal::prior
               ? transition_logpdf(x, x_prev)
               : optimal_proposal_logpdf(x, x_prev, y);
  }

 private:
  double beta0_;
  double beta1_;
  double obs_var_;
  Proposal proposal_;
};

}  // namespace smcir
