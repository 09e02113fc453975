#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "smcir/cloud.hpp"
#include "smcir/resampling.hpp"
#include "smcir/rng.hpp"
#include "smcir/state_space.hpp"
#include "smcir/weights.hpp"

namespace smcir {

/// When the classical filter resamples: every step, or once the
/// normalized ESS of the updated weights drops below `fraction`.
struct ResamplePolicy {
  enum class Kind { always, ess_below };
  Kind kind = Kind::always;
  double fraction = 0.5;

  static ResamplePolicy always() { return {Kind::always, 0.0}; }
  static ResamplePolicy ess_below(double fraction) {
    return {Kind::ess_below, fraction};
  }
  bool triggers(double ess_norm) const {
    return kind == Kind::always || ess_norm < fraction;
  }
};

template <class State>
struct SirStep {
  ParticleCloud<State> cloud;       // carried forward
  std::vector<State> proposed;      // pre-resampling particles
  std::vector<double> sis_weights;  // their normalized weights
  bool resampled = false;
  bool degenerate = false;
};

/// Classical SIR step: propagate every particle through the proposal,
/// update the weights with the transition/likelihood/proposal ratio,
/// and multinomially resample when the policy triggers.  The weighted
/// pre-resampling set is retained for the SIS estimate.  RNG order:
/// N proposal draws, then (if triggered) N index draws.
template <StateSpace M>
SirStep<typename M::State> sir_step(const ParticleCloud<typename M::State>& cloud,
                                    const M& model, const typename M::Obs& y,
                                    ResamplePolicy policy, RngStream& rng) {
  const std::size_t n = cloud.size();
  SirStep<typename M::State> out;
  out.proposed.reserve(n);
  std::vector<double> lw(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& xp = cloud.states[i];
    out.proposed.push_back(model.proposal_sample(xp, y, rng));
    const auto& x = out.proposed.back();
    lw[i] = std::log(cloud.weights[i]) + model.transition_logpdf(x, xp) +
            model.likelihood_logpdf(y, x) - model.proposal_logpdf(x, xp, y);
  }

  out.cloud.step = cloud.step + 1;
  out.cloud.sampling_ops = cloud.sampling_ops + n;
  out.cloud.degenerate_steps = cloud.degenerate_steps;
  out.degenerate = detail::install_weights(out.cloud, std::move(lw));
  out.sis_weights = out.cloud.weights;

  if (policy.triggers(normalized_ess(out.cloud.weights))) {
    const auto idx = multinomial_resample(out.cloud.weights, n, rng);
    out.cloud.states.reserve(n);
    out.cloud.prev_states.reserve(n);
    for (auto i : idx) {
      out.cloud.states.push_back(out.proposed[i]);
      out.cloud.prev_states.push_back(cloud.states[i]);
    }
    detail::set_uniform_weights(out.cloud);
    out.cloud.sampling_ops += n;
    out.resampled = true;
  } else {
    out.cloud.states = out.proposed;
    out.cloud.prev_states = cloud.states;
  }
  return out;
}

/// Candidate bookkeeping of one independent-resampling step, kept for
/// the second-stage reweighting.  Row i holds the i-th replicate's N
/// candidate log-weights log(w_{k-1}^j f g / q); candidate j of every
/// replicate extends trajectory j, and `ancestors[i]` records which
/// trajectory's candidate survived that replicate's resampling.
struct CandidateTable {
  std::size_t n_traj = 0;
  std::vector<double> log_cand_weights;  // rows * n_traj, row-major
  std::vector<std::size_t> ancestors;

  std::size_t rows() const { return ancestors.size(); }
  double log_weight(std::size_t row, std::size_t j) const {
    return log_cand_weights[row * n_traj + j];
  }
};

template <class State>
struct IndependentStep {
  ParticleCloud<State> cloud;
  CandidateTable table;
  std::size_t degenerate_rows = 0;
};

/// Independent-resampling SIR step.  Every output replicate draws one
/// fresh candidate per retained trajectory, weights the row, and
/// resamples a single index, so given the previous cloud the outputs
/// are conditionally i.i.d. from the compound mixture density.  Output
/// weights are uniform; callers wanting the weighted variant install
/// the second-stage weights afterwards.  RNG order per replicate:
/// N proposal draws (trajectory order), then one index draw.
template <StateSpace M>
IndependentStep<typename M::State> independent_sir_step(
    const ParticleCloud<typename M::State>& cloud, const M& model,
    const typename M::Obs& y, std::size_t m_out, RngStream& rng) {
  using State = typename M::State;
  const std::size_t n = cloud.size();
  IndependentStep<State> out;
  out.table.n_traj = n;
  out.table.log_cand_weights.resize(m_out * n);
  out.table.ancestors.resize(m_out);
  out.cloud.states.reserve(m_out);
  out.cloud.prev_states.reserve(m_out);

  std::vector<double> log_w_prev(n);
  for (std::size_t j = 0; j < n; ++j)
    log_w_prev[j] = std::log(cloud.weights[j]);

  std::vector<State> candidates;
  candidates.reserve(n);
  for (std::size_t i = 0; i < m_out; ++i) {
    candidates.clear();
    double* row = &out.table.log_cand_weights[i * n];
    for (std::size_t j = 0; j < n; ++j) {
      const auto& xp = cloud.states[j];
      candidates.push_back(model.proposal_sample(xp, y, rng));
      const auto& x = candidates.back();
      row[j] = log_w_prev[j] + model.transition_logpdf(x, xp) +
               model.likelihood_logpdf(y, x) -
               model.proposal_logpdf(x, xp, y);
    }
    std::size_t pick = 0;
    try {
      const auto w = normalize_log_weights(std::span<const double>(row, n));
      pick = categorical_draw(w, rng);
    } catch (const AllWeightsDegenerate&) {
      const std::vector<double> w(n, 1.0 / static_cast<double>(n));
      pick = categorical_draw(w, rng);
      out.degenerate_rows += 1;
    }
    out.table.ancestors[i] = pick;
    out.cloud.states.push_back(candidates[pick]);
    out.cloud.prev_states.push_back(cloud.states[pick]);
  }

  out.cloud.step = cloud.step + 1;
  out.cloud.sampling_ops =
      cloud.sampling_ops + static_cast<std::uint64_t>(n) * m_out + m_out;
  out.cloud.degenerate_steps =
      cloud.degenerate_steps + (out.degenerate_rows > 0 ? 1 : 0);
  detail::set_uniform_weights(out.cloud);
  return out;
}

struct SecondStageWeights {
  std::vector<double> weights;
  bool degenerate = false;
};

/// Post-resampling weights of the independent step's outputs:
/// w_i proportional to r_{l_i}(x_i) / h_hat_{l_i}(x_i), where r_l is
/// the candidate weight already cached in the table and h_hat recycles
/// each row's co-candidates (slot l excluded).  Rows whose co-candidate
/// weight sum vanishes are skipped; if every row is skipped for every
/// output, the weights fall back to uniform with the degenerate flag.
/// With a single trajectory there are no co-candidates, h_hat is the
/// constant M, and the weights reduce to plain importance weights over
/// the chosen states.
inline SecondStageWeights second_stage_weights(const CandidateTable& table) {
  const std::size_t m = table.rows();
  const std::size_t n = table.n_traj;
  SecondStageWeights out;

  // Per-row prefix/suffix log-sum-exp so the sum over j != l is O(1).
  std::vector<double> prefix(m * n), suffix(m * n);
  for (std::size_t r = 0; r < m; ++r) {
    double acc = neg_inf;
    for (std::size_t j = 0; j < n; ++j) {
      acc = log_add_exp(acc, table.log_weight(r, j));
      prefix[r * n + j] = acc;
    }
    acc = neg_inf;
    for (std::size_t j = n; j-- > 0;) {
      acc = log_add_exp(acc, table.log_weight(r, j));
      suffix[r * n + j] = acc;
    }
  }
  auto excl = [&](std::size_t r, std::size_t l) {
    const double left = l > 0 ? prefix[r * n + l - 1] : neg_inf;
    const double right = l + 1 < n ? suffix[r * n + l + 1] : neg_inf;
    return log_add_exp(left, right);
  };

  std::vector<double> lw(m, neg_inf);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t l = table.ancestors[i];
    const double lrx = table.log_weight(i, l);
    if (lrx == neg_inf) continue;
    double h = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      const double co = excl(r, l);
      if (n > 1 && co == neg_inf) continue;  // row skipped
      h += std::exp(lrx - log_add_exp(lrx, co));
    }
    if (h > 0.0) lw[i] = lrx - std::log(h);
  }
  try {
    out.weights = normalize_log_weights(lw);
  } catch (const AllWeightsDegenerate&) {
    out.weights.assign(m, 1.0 / static_cast<double>(m));
    out.degenerate = true;
  }
  return out;
}

/// First-stage weights and propagation kernel of an auxiliary filter.
template <StateSpace M>
struct ApfSpec {
  using State = typename M::State;
  using Obs = typename M::Obs;
  /// Unnormalized log first-stage weight per trajectory.
  std::function<std::vector<double>(const ParticleCloud<State>&, const Obs&)>
      log_first_stage;
  std::function<State(const State&, const Obs&, RngStream&)> tau_sample;
  std::function<double(const State&, const State&, const Obs&)> tau_logpdf;
};

template <class State>
struct ApfStep {
  ParticleCloud<State> cloud;
  std::vector<std::size_t> ancestors;
  bool degenerate = false;
};

/// Auxiliary particle filter step: preselect ancestors by the
/// first-stage weights, propagate through tau, and correct with the
/// second-stage ratio.  RNG order: N ancestor index draws as one
/// multinomial block, then N tau draws in output order.
template <StateSpace M>
ApfStep<typename M::State> apf_step(const ParticleCloud<typename M::State>& cloud,
                                    const M& model, const typename M::Obs& y,
                                    const ApfSpec<M>& spec, RngStream& rng) {
  const std::size_t n = cloud.size();
  ApfStep<typename M::State> out;

  std::vector<double> mu;
  bool mu_degenerate = false;
  try {
    mu = normalize_log_weights(spec.log_first_stage(cloud, y));
  } catch (const AllWeightsDegenerate&) {
    mu.assign(n, 1.0 / static_cast<double>(n));
    mu_degenerate = true;
  }
  out.ancestors = multinomial_resample(mu, n, rng);

  std::vector<double> lw(n);
  out.cloud.states.reserve(n);
  out.cloud.prev_states.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t l = out.ancestors[i];
    const auto& xp = cloud.states[l];
    out.cloud.states.push_back(spec.tau_sample(xp, y, rng));
    const auto& x = out.cloud.states.back();
    out.cloud.prev_states.push_back(xp);
    lw[i] = std::log(cloud.weights[l]) + model.transition_logpdf(x, xp) +
            model.likelihood_logpdf(y, x) - std::log(mu[l]) -
            spec.tau_logpdf(x, xp, y);
  }
  out.cloud.step = cloud.step + 1;
  out.cloud.sampling_ops = cloud.sampling_ops + 2 * n;
  out.cloud.degenerate_steps = cloud.degenerate_steps + (mu_degenerate ? 1 : 0);
  out.degenerate = detail::install_weights(out.cloud, std::move(lw));
  out.degenerate = out.degenerate || mu_degenerate;
  return out;
}

/// Optimal first-stage weights w_{k-1} * p(y_k | x_{k-1}) combined with
/// the optimal conditional proposal: the fully adapted filter.  All
/// weight factors cancel, so the output weights are uniform to within
/// rounding.
template <AdaptedStateSpace M>
ApfStep<typename M::State> fa_apf_step(
    const ParticleCloud<typename M::State>& cloud, const M& model,
    const typename M::Obs& y, RngStream& rng) {
  using State = typename M::State;
  using Obs = typename M::Obs;
  ApfSpec<M> spec;
  spec.log_first_stage = [&model](const ParticleCloud<State>& c,
                                  const Obs& yk) {
    std::vector<double> lw(c.size());
    for (std::size_t i = 0; i < c.size(); ++i)
      lw[i] = std::log(c.weights[i]) +
              model.predictive_loglik(yk, c.states[i]);
    return lw;
  };
  spec.tau_sample = [&model](const State& xp, const Obs& yk, RngStream& g) {
    return model.optimal_proposal_sample(xp, yk, g);
  };
  spec.tau_logpdf = [&model](const State& x, const State& xp, const Obs& yk) {
    return model.optimal_proposal_logpdf(x, xp, yk);
  };
  return apf_step(cloud, model, y, spec, rng);
}

}  // namespace smcir
