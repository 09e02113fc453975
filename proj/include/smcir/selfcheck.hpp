#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "smcir/filter_runs.hpp"
#include "smcir/filters.hpp"
#include "smcir/models/arch.hpp"
#include "smcir/models/static_gaussian.hpp"
#include "smcir/qtilde.hpp"
#include "smcir/resampling.hpp"
#include "smcir/rng.hpp"
#include "smcir/static_estimators.hpp"
#include "smcir/weights.hpp"

namespace smcir {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

using ResamplerFn = std::function<std::vector<std::size_t>(
    std::span<const double>, std::size_t, RngStream&)>;

/// Test seams for the negative paths of the verify command; production
/// callers leave the defaults in place.
struct SelfcheckHooks {
  ResamplerFn resampler;
};

namespace detail {

inline StaticTarget selfcheck_toy() {
  StaticTarget t;
  t.log_target_u = [](double x) {
    return x < 0.5 ? std::log(1.0) : std::log(3.0);
  };
  t.sample_proposal = [](RngStream& rng) {
    return rng.uniform() < 0.5 ? 0.0 : 1.0;
  };
  t.log_proposal = [](double) { return std::log(0.5); };
  t.f = [](double x) { return x; };
  return t;
}

inline double sample_mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double sample_var(const std::vector<double>& v, double mu) {
  double s = 0;
  for (double x : v) s += (x - mu) * (x - mu);
  return s / static_cast<double>(v.size() - 1);
}

inline double var_std_err(const std::vector<double>& v, double mu, double s2) {
  double m4 = 0;
  for (double x : v) {
    const double d = (x - mu) * (x - mu);
    m4 += d * d;
  }
  m4 /= static_cast<double>(v.size());
  return std::sqrt(std::max(0.0, m4 - s2 * s2) /
                   static_cast<double>(v.size()));
}

}  // namespace detail

/// Fast oracle and property suites: the checks the `verify` command
/// runs.  Pinned seed; the whole battery takes a few seconds.
inline std::vector<CheckResult> run_selfchecks(std::uint64_t seed = 20240808,
                                               SelfcheckHooks hooks = {}) {
  if (!hooks.resampler) {
    hooks.resampler = [](std::span<const double> w, std::size_t m,
                         RngStream& rng) {
      return multinomial_resample(w, m, rng);
    };
  }
  std::vector<CheckResult> results;
  auto add = [&](const std::string& name, bool pass,
                 const std::string& detail) {
    results.push_back({name, pass, detail});
  };

  {  // weight normalization
    bool ok = true;
    std::ostringstream msg;
    const auto w1 = normalize_log_weights(std::vector<double>{0, 0, 0, 0});
    for (double w : w1) ok = ok && std::abs(w - 0.25) < 1e-14;
    const auto w2 = normalize_log_weights(
        std::vector<double>{std::log(1.0), std::log(3.0)});
    ok = ok && std::abs(w2[0] - 0.25) < 1e-14 && std::abs(w2[1] - 0.75) < 1e-14;
    const auto w3 =
        normalize_log_weights(std::vector<double>{0.0, neg_inf});
    ok = ok && w3[0] == 1.0 && w3[1] == 0.0;
    RngStream rng(seed, 1);
    for (int rep = 0; rep < 50 && ok; ++rep) {
      std::vector<double> lw(16);
      for (auto& v : lw) v = 60.0 * (rng.uniform() - 0.5);
      const auto w = normalize_log_weights(lw);
      double s = 0;
      for (double v : w) s += v;
      ok = ok && std::abs(s - 1.0) <= 1e-12;
      std::vector<double> lw2(16);
      for (int i = 0; i < 16; ++i) lw2[i] = std::log(w[i]);
      const auto w4 = normalize_log_weights(lw2);
      for (int i = 0; i < 16; ++i) ok = ok && std::abs(w4[i] - w[i]) <= 1e-12;
    }
    bool threw = false;
    try {
      normalize_log_weights(std::vector<double>{neg_inf, neg_inf});
    } catch (const AllWeightsDegenerate&) {
      threw = true;
    }
    ok = ok && threw;
    add("weight-normalization", ok, "examples, idempotence, degenerate error");
  }

  {  // ESS bounds
    bool ok =
        std::abs(effective_sample_size(std::vector<double>{0.25, 0.25, 0.25,
                                                           0.25}) -
                 4.0) < 1e-12 &&
        std::abs(effective_sample_size(std::vector<double>{1.0, 0.0, 0.0}) -
                 1.0) < 1e-12 &&
        std::abs(effective_sample_size(std::vector<double>{0.5, 0.25, 0.25}) -
                 8.0 / 3.0) < 1e-12;
    RngStream rng(seed, 2);
    for (int rep = 0; rep < 100 && ok; ++rep) {
      std::vector<double> lw(12);
      for (auto& v : lw) v = 8.0 * (rng.uniform() - 0.5);
      const auto w = normalize_log_weights(lw);
      const double ess = effective_sample_size(w);
      ok = ok && ess >= 1.0 - 1e-9 && ess <= 12.0 + 1e-9;
    }
    add("ess-bounds", ok, "examples and 1 <= ESS <= N");
  }

  {  // resampling unbiasedness (hooked resampler)
    const std::vector<double> w{0.2, 0.5, 0.3};
    const std::size_t m = 50, reps = 10000;
    RngStream rng(seed, 3);
    std::array<double, 3> mean_count{0, 0, 0};
    for (std::size_t r = 0; r < reps; ++r) {
      const auto idx = hooks.resampler(w, m, rng);
      for (auto i : idx) mean_count[i] += 1.0;
    }
    bool ok = true;
    std::ostringstream msg;
    for (std::size_t i = 0; i < 3; ++i) {
      mean_count[i] /= static_cast<double>(reps);
      const double bound =
          4.0 * std::sqrt(m * w[i] * (1.0 - w[i]) / static_cast<double>(reps));
      msg << (i ? " " : "") << mean_count[i];
      ok = ok && std::abs(mean_count[i] - m * w[i]) <= bound;
    }
    add("resampling-unbiasedness", ok, "mean counts " + msg.str());
  }

  {  // determinism
    const std::vector<double> w{0.1, 0.2, 0.3, 0.4};
    RngStream a(seed, 4), b(seed, 4);
    bool ok = multinomial_resample(w, 512, a) == multinomial_resample(w, 512, b);
    const ArchModel arch(3.0, 0.75, 1.0);
    RngStream d1(seed, 5), d2(seed, 5);
    const auto t1 = simulate(arch, 10, d1);
    const auto t2 = simulate(arch, 10, d2);
    ok = ok && t1.states == t2.states && t1.observations == t2.observations;
    RngStream f1(seed, 6), f2(seed, 6);
    const auto r1 =
        run_independent_filter(arch, t1.observations, 12, true, f1);
    const auto r2 =
        run_independent_filter(arch, t2.observations, 12, true, f2);
    ok = ok && r1.estimates == r2.estimates;
    add("determinism", ok, "bit-identical draws and filter runs");
  }

  {  // stream independence smoke test
    const int n = 20000;
    RngStream a(seed, 7), b(seed, 8);
    double sa = 0, sb = 0, sab = 0, saa = 0, sbb = 0;
    for (int i = 0; i < n; ++i) {
      const double x = a.uniform() - 0.5;
      const double y = b.uniform() - 0.5;
      sa += x;
      sb += y;
      sab += x * y;
      saa += x * x;
      sbb += y * y;
    }
    const double corr = (sab - sa * sb / n) /
                        std::sqrt((saa - sa * sa / n) * (sbb - sb * sb / n));
    std::ostringstream msg;
    msg << "corr=" << corr;
    add("stream-independence", std::abs(corr) <= 4.0 / std::sqrt(double(n)),
        msg.str());
  }

  const std::vector<double> toy_p{1.0, 3.0};
  const std::vector<double> toy_q{0.5, 0.5};
  {  // qtilde oracle
    bool ok = true;
    const auto q1 = qtilde_exact_discrete(toy_p, toy_q, 1);
    ok = ok && std::abs(q1[0] - 0.5) < 1e-14 && std::abs(q1[1] - 0.5) < 1e-14;
    const auto q2 = qtilde_exact_discrete(toy_p, toy_q, 2);
    ok = ok && std::abs(q2[0] - 0.375) < 1e-14 &&
         std::abs(q2[1] - 0.625) < 1e-14;
    for (std::size_t n = 1; n <= 4 && ok; ++n) {
      const auto qt = qtilde_exact_discrete(toy_p, toy_q, n);
      double s = 0;
      for (double v : qt) s += v;
      ok = ok && std::abs(s - 1.0) <= 1e-12;
    }
    add("qtilde-oracle", ok, "N=1 identity, toy value, normalization");
  }

  {  // marginal law of the independent draws vs the enumeration oracle
    const auto t = detail::selfcheck_toy();
    bool ok = true;
    std::ostringstream msg;
    RngStream rng(seed, 9);
    for (std::size_t n = 2; n <= 4; ++n) {
      const auto qt = qtilde_exact_discrete(toy_p, toy_q, n);
      const std::size_t reps = 100000;
      const auto rows = sample_independent_sir(t, n, reps, rng);
      std::size_t zeros = 0;
      for (const auto& row : rows)
        if (row.candidates[row.chosen] < 0.5) ++zeros;
      const double e0 = reps * qt[0], e1 = reps * qt[1];
      const double chi2 = (zeros - e0) * (zeros - e0) / e0 +
                          (reps - zeros - e1) * (reps - zeros - e1) / e1;
      msg << "chi2(N=" << n << ")=" << chi2 << " ";
      ok = ok && chi2 < 6.634896601;
    }
    add("marginal-law-chi2", ok, msg.str());
  }

  {  // exact moment identity at N=2, M=2 by full enumeration
    const std::array<double, 2> f{0.0, 1.0};
    const std::array<double, 2> r{toy_p[0] / toy_q[0], toy_p[1] / toy_q[1]};
    double e_is = 0, e2_is = 0, e_sir = 0, e2_sir = 0;
    std::array<double, 2> marginal{0.0, 0.0};
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        const double prob = toy_q[a] * toy_q[b];
        const double wa = r[a] / (r[a] + r[b]);
        const double wb = 1.0 - wa;
        const double theta_is = wa * f[a] + wb * f[b];
        e_is += prob * theta_is;
        e2_is += prob * theta_is * theta_is;
        marginal[a] += prob * wa;
        marginal[b] += prob * wb;
        const std::array<double, 2> w{wa, wb};
        const std::array<int, 2> xs{a, b};
        for (int l1 = 0; l1 < 2; ++l1)
          for (int l2 = 0; l2 < 2; ++l2) {
            const double pp = prob * w[l1] * w[l2];
            const double theta = 0.5 * (f[xs[l1]] + f[xs[l2]]);
            e_sir += pp * theta;
            e2_sir += pp * theta * theta;
          }
      }
    }
    const double e_one = marginal[0] * f[0] + marginal[1] * f[1];
    const double e2_one = marginal[0] * f[0] * f[0] + marginal[1] * f[1] * f[1];
    const double var_is = e2_is - e_is * e_is;
    const double var_sir = e2_sir - e_sir * e_sir;
    const double var_isir = (e2_one - e_one * e_one) / 2.0;
    const double gap = std::abs(var_sir - var_isir - 0.5 * var_is);
    const auto qt = qtilde_exact_discrete(toy_p, toy_q, 2);
    const bool ok = gap <= 1e-12 && std::abs(marginal[0] - qt[0]) <= 1e-12 &&
                    std::abs(e_is - e_sir) <= 1e-15 &&
                    std::abs(e_is - e_one) <= 1e-15;
    std::ostringstream msg;
    msg << "identity gap " << gap;
    add("variance-identity-exact", ok, msg.str());
  }

  {  // the same moment identity, statistically at N=10, M=10
    const auto t = detail::selfcheck_toy();
    const std::size_t reps = 10000, n = 10, m = 10;
    std::vector<double> v_is(reps), v_sir(reps), v_isir(reps);
    RngStream r1(seed, 10), r2(seed, 11), r3(seed, 12);
    for (std::size_t r = 0; r < reps; ++r) {
      v_is[r] = estimate_is(t, n, r1).value;
      v_sir[r] = estimate_sir(t, n, m, r2).value;
      v_isir[r] = estimate_isir(sample_independent_sir(t, n, m, r3), t).value;
    }
    const double m_is = detail::sample_mean(v_is);
    const double m_sir = detail::sample_mean(v_sir);
    const double m_isir = detail::sample_mean(v_isir);
    const double s_is = detail::sample_var(v_is, m_is);
    const double s_sir = detail::sample_var(v_sir, m_sir);
    const double s_isir = detail::sample_var(v_isir, m_isir);
    bool ok = std::abs(m_is - m_sir) <=
              4.0 * std::sqrt(s_is / reps + s_sir / reps);
    ok = ok && std::abs(m_is - m_isir) <=
                   4.0 * std::sqrt(s_is / reps + s_isir / reps);
    const double frac = static_cast<double>(m - 1) / m;
    const double gap = s_sir - s_isir - frac * s_is;
    const double se =
        std::sqrt(std::pow(detail::var_std_err(v_sir, m_sir, s_sir), 2) +
                  std::pow(detail::var_std_err(v_isir, m_isir, s_isir), 2) +
                  std::pow(frac * detail::var_std_err(v_is, m_is, s_is), 2));
    ok = ok && std::abs(gap) <= 4.0 * se;
    std::ostringstream msg;
    msg << "variance gap " << gap << " (4se=" << 4.0 * se << ")";
    add("variance-identity-statistical", ok, msg.str());
  }

  {  // FA-APF weight uniformity
    const ArchModel arch(3.0, 0.75, 1.0);
    RngStream data(seed, 13), rng(seed, 14);
    const auto traj = simulate(arch, 20, data);
    auto cloud = init_cloud(arch, traj.observations[0], 50, rng);
    bool ok = true;
    for (std::size_t k = 1; k <= 20; ++k) {
      auto step = fa_apf_step(cloud, arch, traj.observations[k], rng);
      cloud = std::move(step.cloud);
      for (double w : cloud.weights)
        ok = ok && std::abs(w - 1.0 / 50.0) <= 1e-12;
    }
    add("fa-apf-uniform-weights", ok, "uniform to 1e-12 over 20 steps");
  }

  {  // APF with prior first stage == resample-then-move, seed for seed
    const ArchModel arch(3.0, 0.75, 1.0);
    ParticleCloud<double> cloud;
    cloud.states = {-0.8, 0.1, 0.9, 1.7};
    cloud.prev_states = cloud.states;
    cloud.weights = {0.5, 0.25, 0.125, 0.125};
    cloud.log_weights.resize(4);
    for (int i = 0; i < 4; ++i)
      cloud.log_weights[i] = std::log(cloud.weights[i]);
    const double y = 0.6;
    ApfSpec<ArchModel> spec;
    spec.log_first_stage = [](const ParticleCloud<double>& c, const double&) {
      std::vector<double> lw(c.size());
      for (std::size_t i = 0; i < c.size(); ++i)
        lw[i] = std::log(c.weights[i]);
      return lw;
    };
    spec.tau_sample = [&arch](const double& xp, const double& yk,
                              RngStream& g) {
      return arch.proposal_sample(xp, yk, g);
    };
    spec.tau_logpdf = [&arch](const double& x, const double& xp,
                              const double& yk) {
      return arch.proposal_logpdf(x, xp, yk);
    };
    RngStream a(seed, 15);
    const auto apf = apf_step(cloud, arch, y, spec, a);
    RngStream b(seed, 15);
    const auto idx = multinomial_resample(cloud.weights, 4, b);
    ParticleCloud<double> resampled;
    for (auto i : idx) {
      resampled.states.push_back(cloud.states[i]);
      resampled.prev_states.push_back(cloud.states[i]);
    }
    detail::set_uniform_weights(resampled);
    const auto sir =
        sir_step(resampled, arch, y, ResamplePolicy::ess_below(0.0), b);
    bool ok = !sir.resampled;
    for (std::size_t i = 0; i < 4; ++i) {
      ok = ok && apf.cloud.states[i] == sir.cloud.states[i];
      ok = ok && std::abs(apf.cloud.weights[i] - sir.cloud.weights[i]) <= 1e-12;
    }
    add("apf-sir-reduction", ok, "states bitwise equal, weights to 1e-12");
  }

  {  // budget ledger
    const auto t = detail::selfcheck_toy();
    RngStream rng(seed, 16);
    bool ok = estimate_is(t, 17, rng).sampling_ops == 17;
    ok = ok && estimate_sir(t, 17, 5, rng).sampling_ops == 22;
    ok = ok && estimate_sir_w(t, 17, 5, rng).sampling_ops == 17 + 5 + 5 * 16;
    const auto rows = sample_independent_sir(t, 17, 5, rng);
    ok = ok && estimate_isir(rows, t).sampling_ops == 17 * 5 + 5;
    ok = ok && estimate_isir_w(rows, t).sampling_ops == 17 * 5 + 5;
    const ArchModel arch(3.0, 0.75, 1.0);
    RngStream data(seed, 17), f1(seed, 18), f2(seed, 19);
    const auto traj = simulate(arch, 8, data);
    ok = ok && run_sis_filter(arch, traj.observations, 16,
                              ResamplePolicy::always(), f1)
                       .sampling_ops == 8 * 32;
    ok = ok && run_independent_filter(arch, traj.observations, 16, false, f2)
                       .sampling_ops == 8 * (16 * 16 + 16);
    add("budget-ledger", ok, "static and sequential op counts");
  }

  return results;
}

}  // namespace smcir
