#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "smcir/cloud.hpp"
#include "smcir/filters.hpp"
#include "smcir/state_space.hpp"

namespace smcir {

/// Per-step estimates and diagnostics of one filter pass over y_{0:T}.
/// `estimates[k]` targets E(x_k | y_{0:k}); the entry at k = 0 comes
/// from the likelihood-weighted initial cloud for every variant.
template <class State>
struct FilterRun {
  std::vector<State> estimates;
  double ess_norm_mean = 1.0;
  std::size_t degenerate_steps = 0;
  std::uint64_t sampling_ops = 0;
};

/// Classical filter; the reported estimate is the pre-resampling
/// weighted one.  The resampling policy also applies to the
/// likelihood-weighted initial cloud (after its estimate is taken), so
/// an always-resampling run starts from a rejuvenated support.  Init
/// draws stay outside the sampling_ops ledger.
template <StateSpace M>
FilterRun<typename M::State> run_sis_filter(
    const M& model, std::span<const typename M::Obs> ys, std::size_t n,
    ResamplePolicy policy, RngStream& rng) {
  FilterRun<typename M::State> out;
  auto cloud = init_cloud(model, ys[0], n, rng);
  out.estimates.push_back(theta_sis(cloud));
  if (policy.triggers(normalized_ess(cloud.weights))) {
    const auto idx = multinomial_resample(cloud.weights, n, rng);
    std::vector<typename M::State> states;
    states.reserve(n);
    for (auto i : idx) states.push_back(cloud.states[i]);
    cloud.prev_states = states;
    cloud.states = std::move(states);
    detail::set_uniform_weights(cloud);
  }
  double ess_sum = 0.0;
  for (std::size_t k = 1; k < ys.size(); ++k) {
    auto step = sir_step(cloud, model, ys[k], policy, rng);
    out.estimates.push_back(theta_weighted<typename M::State>(
        step.proposed, step.sis_weights));
    ess_sum += normalized_ess(step.sis_weights);
    cloud = std::move(step.cloud);
  }
  out.ess_norm_mean = ys.size() > 1
                          ? ess_sum / static_cast<double>(ys.size() - 1)
                          : normalized_ess(cloud.weights);
  out.degenerate_steps = cloud.degenerate_steps;
  out.sampling_ops = cloud.sampling_ops;
  return out;
}

/// Independent-resampling filter.  The chain itself always carries the
/// uniform weights the step produces; with `weighted` true the
/// second-stage weights are computed each step and used for the
/// reported estimate (and its ESS diagnostic), with `weighted` false
/// the unweighted mean is reported.
template <StateSpace M>
FilterRun<typename M::State> run_independent_filter(
    const M& model, std::span<const typename M::Obs> ys, std::size_t m,
    bool weighted, RngStream& rng) {
  FilterRun<typename M::State> out;
  auto cloud = init_cloud(model, ys[0], m, rng);
  out.estimates.push_back(theta_sis(cloud));
  double ess_sum = 0.0;
  for (std::size_t k = 1; k < ys.size(); ++k) {
    auto step = independent_sir_step(cloud, model, ys[k], m, rng);
    cloud = std::move(step.cloud);
    if (weighted) {
      auto ss = second_stage_weights(step.table);
      out.estimates.push_back(theta_isir_w(cloud, ss.weights));
      ess_sum += normalized_ess(ss.weights);
      if (ss.degenerate) cloud.degenerate_steps += 1;
    } else {
      out.estimates.push_back(theta_isir(cloud));
      ess_sum += 1.0;
    }
  }
  out.ess_norm_mean = ys.size() > 1
                          ? ess_sum / static_cast<double>(ys.size() - 1)
                          : normalized_ess(cloud.weights);
  out.degenerate_steps = cloud.degenerate_steps;
  out.sampling_ops = cloud.sampling_ops;
  return out;
}

/// Auxiliary filter with caller-supplied first-stage weights and
/// propagation kernel.
template <StateSpace M>
FilterRun<typename M::State> run_apf_filter(
    const M& model, std::span<const typename M::Obs> ys, std::size_t n,
    const ApfSpec<M>& spec, RngStream& rng) {
  FilterRun<typename M::State> out;
  auto cloud = init_cloud(model, ys[0], n, rng);
  out.estimates.push_back(theta_sis(cloud));
  double ess_sum = 0.0;
  for (std::size_t k = 1; k < ys.size(); ++k) {
    auto step = apf_step(cloud, model, ys[k], spec, rng);
    cloud = std::move(step.cloud);
    out.estimates.push_back(theta_sis(cloud));
    ess_sum += normalized_ess(cloud.weights);
  }
  out.ess_norm_mean = ys.size() > 1
                          ? ess_sum / static_cast<double>(ys.size() - 1)
                          : normalized_ess(cloud.weights);
  out.degenerate_steps = cloud.degenerate_steps;
  out.sampling_ops = cloud.sampling_ops;
  return out;
}

/// Fully adapted filter (closed-form first stage and proposal).
template <AdaptedStateSpace M>
FilterRun<typename M::State> run_fa_apf_filter(
    const M& model, std::span<const typename M::Obs> ys, std::size_t n,
    RngStream& rng) {
  FilterRun<typename M::State> out;
  auto cloud = init_cloud(model, ys[0], n, rng);
  out.estimates.push_back(theta_sis(cloud));
  double ess_sum = 0.0;
  for (std::size_t k = 1; k < ys.size(); ++k) {
    auto step = fa_apf_step(cloud, model, ys[k], rng);
    cloud = std::move(step.cloud);
    out.estimates.push_back(theta_sis(cloud));
    ess_sum += normalized_ess(cloud.weights);
  }
  out.ess_norm_mean = ys.size() > 1
                          ? ess_sum / static_cast<double>(ys.size() - 1)
                          : normalized_ess(cloud.weights);
  out.degenerate_steps = cloud.degenerate_steps;
  out.sampling_ops = cloud.sampling_ops;
  return out;
}

/// The first-stage/proposal pair of the benchmark auxiliary filter:
/// optimal first-stage weights w_{k-1} p(y_k | x_{k-1}) with blind
/// transition propagation.
template <AdaptedStateSpace M>
ApfSpec<M> optimal_first_stage_apf_spec(const M& model) {
  using State = typename M::State;
  using Obs = typename M::Obs;
  ApfSpec<M> spec;
  spec.log_first_stage = [&model](const ParticleCloud<State>& c,
                                  const Obs& yk) {
    std::vector<double> lw(c.size());
    for (std::size_t i = 0; i < c.size(); ++i)
      lw[i] =
          std::log(c.weights[i]) + model.predictive_loglik(yk, c.states[i]);
    return lw;
  };
  spec.tau_sample = [&model](const State& xp, const Obs&, RngStream& g) {
    return model.transition_sample(xp, g);
  };
  spec.tau_logpdf = [&model](const State& x, const State& xp, const Obs&) {
    return model.transition_logpdf(x, xp);
  };
  return spec;
}

}  // namespace smcir
