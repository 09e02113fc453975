#pragma once

#include <concepts>
#include <cstddef>
#include <vector>

#include "smcir/rng.hpp"

namespace smcir {

/// A hidden Markov model as the filters consume it: initial law,
/// transition kernel f_k, likelihood g_k, observation sampler, and the
/// conditional proposal the particles are drawn from (the transition
/// itself for bootstrap filtering).
template <class M>
concept StateSpace = requires(const M& m, const typename M::State& x,
                              const typename M::Obs& y, RngStream& rng) {
  { m.init_sample(rng) } -> std::convertible_to<typename M::State>;
  { m.init_logpdf(x) } -> std::convertible_to<double>;
  { m.transition_sample(x, rng) } -> std::convertible_to<typename M::State>;
  { m.transition_logpdf(x, x) } -> std::convertible_to<double>;
  { m.likelihood_logpdf(y, x) } -> std::convertible_to<double>;
  { m.sample_obs(x, rng) } -> std::convertible_to<typename M::Obs>;
  { m.proposal_sample(x, y, rng) } -> std::convertible_to<typename M::State>;
  { m.proposal_logpdf(x, x, y) } -> std::convertible_to<double>;
};

/// Models that additionally expose the closed-form predictive
/// likelihood p(y_k | x_{k-1}) and the optimal conditional proposal
/// p(x_k | x_{k-1}, y_k); required by the fully adapted filter.
template <class M>
concept AdaptedStateSpace =
    StateSpace<M> && requires(const M& m, const typename M::State& x,
                              const typename M::Obs& y, RngStream& rng) {
      { m.predictive_loglik(y, x) } -> std::convertible_to<double>;
      {
        m.optimal_proposal_sample(x, y, rng)
      } -> std::convertible_to<typename M::State>;
      { m.optimal_proposal_logpdf(x, x, y) } -> std::convertible_to<double>;
    };

template <class State, class Obs>
struct Trajectory {
  std::vector<State> states;
  std::vector<Obs> observations;
};

/// Joint draw of (x_0:T, y_0:T): x_0 from the initial law, x_k from the
/// transition, y_k from the likelihood, one observation per state.
template <StateSpace M>
Trajectory<typename M::State, typename M::Obs> simulate(const M& model,
                                                        std::size_t horizon,
                                                        RngStream& rng) {
  Trajectory<typename M::State, typename M::Obs> traj;
  traj.states.reserve(horizon + 1);
  traj.observations.reserve(horizon + 1);
  traj.states.push_back(model.init_sample(rng));
  traj.observations.push_back(model.sample_obs(traj.states.back(), rng));
  for (std::size_t k = 1; k <= horizon; ++k) {
    traj.states.push_back(model.transition_sample(traj.states.back(), rng));
    traj.observations.push_back(model.sample_obs(traj.states.back(), rng));
  }
  return traj;
}

}  // namespace smcir
