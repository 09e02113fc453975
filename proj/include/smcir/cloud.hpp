#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "smcir/rng.hpp"
#include "smcir/state_space.hpp"
#include "smcir/weights.hpp"

namespace smcir {

/// Weighted particle approximation of one filtering distribution.
/// `prev_states[i]` is the time-(k-1) ancestor of `states[i]`.
/// `sampling_ops` counts draws consumed by filter steps; the initial
/// prior draw is not included, so after T steps it equals T times the
/// per-step budget of the algorithm.
template <class State>
struct ParticleCloud {
  std::vector<State> states;
  std::vector<State> prev_states;
  std::vector<double> log_weights;
  std::vector<double> weights;
  std::size_t step = 0;
  std::uint64_t sampling_ops = 0;
  std::size_t degenerate_steps = 0;

  std::size_t size() const { return states.size(); }
};

namespace detail {

template <class State>
void set_uniform_weights(ParticleCloud<State>& cloud) {
  const double w = 1.0 / static_cast<double>(cloud.size());
  cloud.weights.assign(cloud.size(), w);
  cloud.log_weights.assign(cloud.size(), std::log(w));
}

/// Normalize `lw` into `cloud`; on total degeneracy substitute uniform
/// weights and bump the cloud's flag counter.
template <class State>
bool install_weights(ParticleCloud<State>& cloud, std::vector<double> lw) {
  try {
    cloud.weights = normalize_log_weights(lw);
    cloud.log_weights = std::move(lw);
    return false;
  } catch (const AllWeightsDegenerate&) {
    set_uniform_weights(cloud);
    cloud.degenerate_steps += 1;
    return true;
  }
}

}  // namespace detail

/// Time-zero cloud: particles from the initial law, weighted by the
/// first observation's likelihood (the proposal at time zero is the
/// prior itself, so the prior terms cancel).
template <StateSpace M>
ParticleCloud<typename M::State> init_cloud(const M& model,
                                            const typename M::Obs& y0,
                                            std::size_t n, RngStream& rng) {
  ParticleCloud<typename M::State> cloud;
  cloud.states.reserve(n);
  std::vector<double> lw(n);
  for (std::size_t i = 0; i < n; ++i) {
    cloud.states.push_back(model.init_sample(rng));
    lw[i] = model.likelihood_logpdf(y0, cloud.states.back());
  }
  cloud.prev_states = cloud.states;
  detail::install_weights(cloud, std::move(lw));
  return cloud;
}

/// Weighted mean with f(x) = x.
template <class State>
State theta_weighted(std::span<const State> states,
                     std::span<const double> weights) {
  State acc = weights[0] * states[0];
  for (std::size_t i = 1; i < states.size(); ++i)
    acc += weights[i] * states[i];
  return acc;
}

template <class State>
State theta_mean(std::span<const State> states) {
  State acc = states[0];
  for (std::size_t i = 1; i < states.size(); ++i) acc += states[i];
  return (1.0 / static_cast<double>(states.size())) * acc;
}

/// Pre-resampling weighted estimate.
template <class State>
State theta_sis(const ParticleCloud<State>& cloud) {
  return theta_weighted<State>(cloud.states, cloud.weights);
}

/// Unweighted mean over a resampled set.
template <class State>
State theta_sir(const ParticleCloud<State>& cloud) {
  return theta_mean<State>(cloud.states);
}

template <class State>
State theta_isir(const ParticleCloud<State>& cloud) {
  return theta_mean<State>(cloud.states);
}

/// Mean under externally supplied weights (the second-stage weights of
/// the independent filter).
template <class State>
State theta_isir_w(const ParticleCloud<State>& cloud,
                   std::span<const double> weights) {
  return theta_weighted<State>(cloud.states, weights);
}

}  // namespace smcir
