#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "smcir/resampling.hpp"
#include "smcir/rng.hpp"
#include "smcir/weights.hpp"

namespace smcir {

/// A static estimation problem: unnormalized log-target, proposal, and
/// the test function whose p-expectation is wanted.  The proposal must
/// cover the target's support (log_proposal finite wherever
/// log_target_u is).  `log_ratio` is an optional analytic shortcut for
/// log(p_u/q); when empty the two densities are evaluated separately.
struct StaticTarget {
  std::function<double(double)> log_target_u;
  std::function<double(RngStream&)> sample_proposal;
  std::function<double(double)> log_proposal;
  std::function<double(double)> f;
  std::function<double(double)> log_ratio;

  double log_ratio_at(double x) const {
    return log_ratio ? log_ratio(x) : log_target_u(x) - log_proposal(x);
  }
};

enum class StaticKind { is, sir, sir_2, sir_w, i_sir, i_sir_w };

inline const char* to_string(StaticKind k) {
  switch (k) {
    case StaticKind::is: return "SIS";
    case StaticKind::sir: return "SIR";
    case StaticKind::sir_2: return "SIR-2";
    case StaticKind::sir_w: return "SIR-w";
    case StaticKind::i_sir: return "I-SIR";
    case StaticKind::i_sir_w: return "I-SIR-w";
  }
  return "?";
}

/// Declared sampling budget per estimator family, counting one unit
/// per draw from any distribution, discrete or continuous.
inline std::uint64_t static_budget(StaticKind k, std::uint64_t n,
                                   std::uint64_t m) {
  switch (k) {
    case StaticKind::is: return n;
    case StaticKind::sir:
    case StaticKind::sir_2: return n + m;
    case StaticKind::sir_w: return n + m + m * (n - 1);
    case StaticKind::i_sir:
    case StaticKind::i_sir_w: return n * m + m;
  }
  return 0;
}

struct StaticEstimate {
  double value = 0.0;
  StaticKind kind = StaticKind::is;
  std::size_t n_intermediate = 0;
  std::size_t n_final = 0;
  std::uint64_t sampling_ops = 0;
};

/// One replicate of the independent resampling scheme: N candidates
/// drawn from q, their log importance ratios, and the index that
/// survived the replicate's own resampling step.
struct ReplicateRow {
  std::vector<double> candidates;
  std::vector<double> log_ratios;
  std::size_t chosen = 0;
};

/// Self-normalized importance sampling with N proposal draws.
inline StaticEstimate estimate_is(const StaticTarget& t, std::size_t n,
                                  RngStream& rng) {
  std::vector<double> lr(n), fx(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = t.sample_proposal(rng);
    lr[i] = t.log_ratio_at(x);
    fx[i] = t.f(x);
  }
  const auto w = normalize_log_weights(lr);
  double v = 0.0;
  for (std::size_t i = 0; i < n; ++i) v += w[i] * fx[i];
  return {v, StaticKind::is, n, n, n};
}

/// Classical dependent SIR: N proposals, one shared weighting, M
/// multinomial picks, unweighted mean of the picks.  RNG order: the N
/// proposal draws, then the M index draws.
inline StaticEstimate estimate_sir(const StaticTarget& t, std::size_t n,
                                   std::size_t m, RngStream& rng,
                                   StaticKind kind = StaticKind::sir) {
  std::vector<double> lr(n), xs(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = t.sample_proposal(rng);
    lr[i] = t.log_ratio_at(xs[i]);
  }
  const auto w = normalize_log_weights(lr);
  const auto idx = multinomial_resample(w, m, rng);
  double v = 0.0;
  for (auto i : idx) v += t.f(xs[i]);
  v /= static_cast<double>(m);
  return {v, kind, n, m, n + m};
}

/// Independent resampling: each of the M replicates draws its own N
/// candidates from q and resamples exactly one of them, so the chosen
/// states are i.i.d. from the compound density qtilde_N.  RNG order per
/// replicate: N proposal draws, then one index draw.
inline std::vector<ReplicateRow> sample_independent_sir(const StaticTarget& t,
                                                        std::size_t n,
                                                        std::size_t m,
                                                        RngStream& rng) {
  std::vector<ReplicateRow> rows(m);
  for (std::size_t i = 0; i < m; ++i) {
    auto& row = rows[i];
    row.candidates.resize(n);
    row.log_ratios.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      row.candidates[j] = t.sample_proposal(rng);
      row.log_ratios[j] = t.log_ratio_at(row.candidates[j]);
    }
    const auto w = normalize_log_weights(row.log_ratios);
    row.chosen = categorical_draw(w, rng);
  }
  return rows;
}

/// Unweighted mean over the replicates' chosen states.
inline StaticEstimate estimate_isir(const std::vector<ReplicateRow>& rows,
                                    const StaticTarget& t) {
  const std::size_t m = rows.size();
  const std::size_t n = rows.front().candidates.size();
  double v = 0.0;
  for (const auto& row : rows) v += t.f(row.candidates[row.chosen]);
  v /= static_cast<double>(m);
  return {v, StaticKind::i_sir, n, m,
          static_cast<std::uint64_t>(n) * m + m};
}

namespace detail {

/// log-sum-exp of each row's first N-1 candidate ratios.  The compound
/// density estimate recycles N-1 co-candidates per replicate; the last
/// slot is the fixed one dropped.
inline std::vector<double> head_lses(const std::vector<ReplicateRow>& rows) {
  std::vector<double> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& lr = rows[i].log_ratios;
    out[i] = log_sum_exp(std::span<const double>(lr.data(), lr.size() - 1));
  }
  return out;
}

/// Recycled Monte Carlo estimate of M times the expected normalized
/// weight of a candidate pinned at ratio `lrx`.
inline double h_hat_from_heads(double lrx, std::span<const double> heads) {
  if (lrx == neg_inf) return 0.0;
  double h = 0.0;
  for (double head : heads) h += std::exp(lrx - log_add_exp(lrx, head));
  return h;
}

}  // namespace detail

/// Estimate of M * h_N(x) by recycling the replicate rows' candidates.
inline double estimate_h_hat(double x, const std::vector<ReplicateRow>& rows,
                             const StaticTarget& t) {
  return detail::h_hat_from_heads(t.log_ratio_at(x), detail::head_lses(rows));
}

/// Post-resampling reweighting of the chosen states: w' proportional to
/// p_u(x) / (h_hat(x) q(x)), self-normalized so every constant factor
/// (including the unknown normalizers of p_u and qtilde_N) cancels.
inline StaticEstimate estimate_isir_w(const std::vector<ReplicateRow>& rows,
                                      const StaticTarget& t) {
  const std::size_t m = rows.size();
  const std::size_t n = rows.front().candidates.size();
  const auto heads = detail::head_lses(rows);
  std::vector<double> lw(m), fx(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double lrx = rows[i].log_ratios[rows[i].chosen];
    const double h = detail::h_hat_from_heads(lrx, heads);
    lw[i] = (h > 0.0) ? lrx - std::log(h) : neg_inf;
    fx[i] = t.f(rows[i].candidates[rows[i].chosen]);
  }
  const auto w = normalize_log_weights(lw);
  double v = 0.0;
  for (std::size_t i = 0; i < m; ++i) v += w[i] * fx[i];
  return {v, StaticKind::i_sir_w, n, m,
          static_cast<std::uint64_t>(n) * m + m};
}

/// Dependent SIR followed by the same h-hat reweighting; the candidate
/// rows backing h-hat are drawn fresh, solely for the weights.  RNG
/// order: N proposals, M index draws, then M rows of N-1 extra draws.
inline StaticEstimate estimate_sir_w(const StaticTarget& t, std::size_t n,
                                     std::size_t m, RngStream& rng) {
  std::vector<double> lr(n), xs(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = t.sample_proposal(rng);
    lr[i] = t.log_ratio_at(xs[i]);
  }
  const auto w = normalize_log_weights(lr);
  const auto idx = multinomial_resample(w, m, rng);

  std::vector<double> heads(m, neg_inf);
  std::vector<double> row(n > 0 ? n - 1 : 0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j + 1 < n; ++j)
      row[j] = t.log_ratio_at(t.sample_proposal(rng));
    heads[i] = log_sum_exp(row);
  }

  std::vector<double> lw(m), fx(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double lrx = lr[idx[k]];
    const double h = detail::h_hat_from_heads(lrx, heads);
    lw[k] = (h > 0.0) ? lrx - std::log(h) : neg_inf;
    fx[k] = t.f(xs[idx[k]]);
  }
  const auto w2 = normalize_log_weights(lw);
  double v = 0.0;
  for (std::size_t k = 0; k < m; ++k) v += w2[k] * fx[k];
  return {v, StaticKind::sir_w, n, m, n + m + m * (n - 1)};
}

}  // namespace smcir
