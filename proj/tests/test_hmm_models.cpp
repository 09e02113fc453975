#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "smcir/kalman.hpp"
#include "smcir/models/arch.hpp"
#include "smcir/models/linear_gaussian.hpp"
#include "smcir/models/range_bearing.hpp"
#include "smcir/models/static_gaussian.hpp"
#include "smcir/state_space.hpp"

using namespace smcir;
using Eigen::MatrixXd;
using Eigen::VectorXd;

static_assert(StateSpace<ArchModel>);
static_assert(AdaptedStateSpace<ArchModel>);
static_assert(StateSpace<LinearGaussianSsm>);
static_assert(AdaptedStateSpace<LinearGaussianSsm>);
static_assert(StateSpace<RangeBearingModel>);
static_assert(!AdaptedStateSpace<RangeBearingModel>);

namespace {
const ArchModel arch(3.0, 0.75, 1.0);
}

TEST_CASE("arch transition and prior laws") {
  CHECK(arch.transition_var(0.0) == 3.0);
  CHECK(arch.transition_logpdf(0.7, 0.0) ==
        Catch::Approx(normal_logpdf(0.7, 0.0, 3.0)).margin(1e-14));
  CHECK(arch.init_logpdf(-0.3) ==
        Catch::Approx(normal_logpdf(-0.3, 0.0, 3.0)).margin(1e-14));
  CHECK_THROWS_AS(ArchModel(0.0, 0.75, 1.0), std::invalid_argument);
}

TEST_CASE("arch predictive likelihood") {
  // variance R + beta0 + beta1 x^2; density values recomputed here
  CHECK(arch.predictive_loglik(0.0, 2.0) ==
        Catch::Approx(-0.5 * std::log(2.0 * M_PI * 7.0)).margin(1e-12));
  CHECK(std::exp(arch.predictive_loglik(0.0, 2.0)) ==
        Catch::Approx(1.0 / std::sqrt(2.0 * M_PI * 7.0)).margin(1e-12));
  CHECK(std::exp(arch.predictive_loglik(0.0, 0.0)) ==
        Catch::Approx(1.0 / std::sqrt(2.0 * M_PI * 4.0)).margin(1e-12));
}

TEST_CASE("arch optimal proposal") {
  SECTION("moments by hand") {
    const auto [mean, var] = arch.optimal_moments(0.0, 4.0);
    CHECK(mean == Catch::Approx(3.0).margin(1e-14));
    CHECK(var == Catch::Approx(0.75).margin(1e-14));
  }
  SECTION("zero observation keeps a zero mean") {
    for (double xp : {-2.0, 0.0, 1.5}) {
      CHECK(arch.optimal_moments(xp, 0.0).first == 0.0);
    }
  }
  SECTION("conditioning shrinks the variance") {
    RngStream rng(1, 0);
    for (int i = 0; i < 100; ++i) {
      const double xp = 4.0 * rng.normal();
      const double y = 4.0 * rng.normal();
      CHECK(arch.optimal_moments(xp, y).second < arch.transition_var(xp));
    }
  }
}

TEST_CASE("factorization identity") {
  // predictive + optimal-proposal = transition + likelihood, pointwise
  SECTION("arch") {
    RngStream rng(2, 0);
    for (int i = 0; i < 100; ++i) {
      const double xp = 3.0 * rng.normal();
      const double x = 3.0 * rng.normal();
      const double y = 3.0 * rng.normal();
      const double lhs =
          arch.predictive_loglik(y, xp) + arch.optimal_proposal_logpdf(x, xp, y);
      const double rhs =
          arch.transition_logpdf(x, xp) + arch.likelihood_logpdf(y, x);
      CHECK(lhs == Catch::Approx(rhs).margin(1e-9));
    }
  }
  SECTION("linear gaussian") {
    const auto model = make_highdim_model(2);
    RngStream rng(3, 0);
    for (int i = 0; i < 100; ++i) {
      VectorXd xp(8), x(8), y(4);
      for (int j = 0; j < 8; ++j) xp(j) = 5.0 * rng.normal();
      for (int j = 0; j < 8; ++j) x(j) = 5.0 * rng.normal();
      for (int j = 0; j < 4; ++j) y(j) = 5.0 * rng.normal();
      const double lhs = model.predictive_loglik(y, xp) +
                         model.optimal_proposal_logpdf(x, xp, y);
      const double rhs =
          model.transition_logpdf(x, xp) + model.likelihood_logpdf(y, x);
      CHECK(lhs == Catch::Approx(rhs).margin(1e-9));
    }
  }
}

TEST_CASE("linear gaussian model construction") {
  SECTION("high-dimensional block replication") {
    const auto model = make_highdim_model(3);
    CHECK(model.dim_x() == 12);
    CHECK(model.dim_y() == 6);
    CHECK(model.q_matrix()(0, 0) == Catch::Approx(25.0 / 3.0));
    CHECK(model.q_matrix()(0, 4) == 0.0);
    CHECK(model.r_matrix()(0, 0) == 4.0);
    CHECK(model.init_cov()(0, 0) == 100.0);
    CHECK(model.init_cov()(1, 1) == 1.0);
  }
  SECTION("non positive definite covariance is rejected") {
    MatrixXd f = MatrixXd::Identity(2, 2);
    MatrixXd q = MatrixXd::Identity(2, 2);
    MatrixXd r(2, 2);
    r << 1.0, 2.0, 2.0, 1.0;  // indefinite
    CHECK_THROWS_AS(LinearGaussianSsm(f, q, MatrixXd::Identity(2, 2), r,
                                      VectorXd::Zero(2),
                                      MatrixXd::Identity(2, 2)),
                    CovarianceNotPd);
  }
  SECTION("vanishing process noise freezes the state") {
    MatrixXd f = MatrixXd::Identity(2, 2);
    MatrixXd q = 1e-24 * MatrixXd::Identity(2, 2);
    LinearGaussianSsm model(f, q, MatrixXd::Identity(2, 2),
                            MatrixXd::Identity(2, 2), VectorXd::Zero(2),
                            MatrixXd::Identity(2, 2));
    RngStream rng(4, 0);
    const auto traj = simulate(model, 10, rng);
    for (const auto& x : traj.states) {
      CHECK((x - traj.states.front()).norm() < 1e-9);
    }
  }
}

TEST_CASE("range bearing geometry") {
  const RangeBearingModel model(10.0, 0.25, M_PI / 720.0);
  SECTION("noise-free measurement at (1, 0)") {
    VectorXd x(4);
    x << 1.0, 0.0, 0.0, 0.0;
    const auto y = model.measurement(x);
    CHECK(y(0) == Catch::Approx(1.0).margin(1e-14));
    CHECK(y(1) == Catch::Approx(0.0).margin(1e-14));
  }
  SECTION("full-quadrant bearing") {
    VectorXd x(4);
    x << -1.0, 0.0, -1.0, 0.0;
    CHECK(model.measurement(x)(1) ==
          Catch::Approx(-3.0 * M_PI / 4.0).margin(1e-12));
  }
  SECTION("likelihood invariant to a 2*pi bearing shift") {
    RngStream rng(5, 0);
    for (int i = 0; i < 50; ++i) {
      VectorXd x(4);
      x << 5.0 * rng.normal(), rng.normal(), 5.0 * rng.normal(), rng.normal();
      if (std::hypot(x(0), x(2)) < 0.1) continue;
      VectorXd y = model.measurement(x);
      y(0) += 0.2 * rng.normal();
      y(1) += 0.01 * rng.normal();
      VectorXd y_shift = y;
      y_shift(1) += 2.0 * M_PI;
      CHECK(model.likelihood_logpdf(y, x) ==
            Catch::Approx(model.likelihood_logpdf(y_shift, x)).margin(1e-12));
    }
  }
  SECTION("angle wrap range") {
    CHECK(wrap_angle(0.0) == Catch::Approx(0.0).margin(1e-15));
    CHECK(wrap_angle(M_PI) == Catch::Approx(M_PI).margin(1e-15));
    CHECK(wrap_angle(-M_PI) == Catch::Approx(M_PI).margin(1e-15));
    CHECK(wrap_angle(3.0 * M_PI) == Catch::Approx(M_PI).margin(1e-12));
    CHECK(wrap_angle(2.5 * M_PI) == Catch::Approx(0.5 * M_PI).margin(1e-12));
  }
}

TEST_CASE("simulate") {
  SECTION("deterministic under a fixed seed") {
    RngStream a(6, 3), b(6, 3);
    const auto ta = simulate(arch, 50, a);
    const auto tb = simulate(arch, 50, b);
    CHECK(ta.states == tb.states);
    CHECK(ta.observations == tb.observations);
    CHECK(ta.states.size() == 51);
  }
  SECTION("arch transition from zero has variance beta0") {
    RngStream rng(7, 0);
    const int n = 100000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
      const double x = arch.transition_sample(0.0, rng);
      s += x;
      s2 += x * x;
    }
    CHECK(s / n == Catch::Approx(0.0).margin(4.0 * std::sqrt(3.0 / n)));
    CHECK(s2 / n == Catch::Approx(3.0).margin(4.0 * 3.0 * std::sqrt(2.0 / n)));
  }
}

TEST_CASE("kalman filter oracle") {
  SECTION("exact observation limit") {
    MatrixXd f = MatrixXd::Identity(2, 2);
    LinearGaussianSsm model(f, MatrixXd::Identity(2, 2),
                            MatrixXd::Identity(2, 2),
                            1e-12 * MatrixXd::Identity(2, 2),
                            VectorXd::Zero(2), MatrixXd::Identity(2, 2));
    std::vector<VectorXd> ys(5, VectorXd::Zero(2));
    RngStream rng(8, 0);
    for (auto& y : ys) {
      y(0) = rng.normal();
      y(1) = rng.normal();
    }
    const auto res = kalman_filter(model, ys);
    for (std::size_t k = 0; k < ys.size(); ++k) {
      CHECK((res.means[k] - ys[k]).norm() < 1e-6);
    }
  }
  SECTION("uninformative observation keeps the prior") {
    MatrixXd f = MatrixXd::Identity(2, 2);
    VectorXd mean(2);
    mean << 3.0, -1.0;
    LinearGaussianSsm model(f, 1e-18 * MatrixXd::Identity(2, 2),
                            MatrixXd::Identity(2, 2),
                            1e12 * MatrixXd::Identity(2, 2), mean,
                            MatrixXd::Identity(2, 2));
    std::vector<VectorXd> ys(1, VectorXd::Zero(2));
    const auto res = kalman_filter(model, ys);
    CHECK((res.means[0] - mean).norm() / mean.norm() < 1e-6);
  }
  SECTION("static scalar reduction matches the conjugate formula") {
    const double y = 1.7;
    LinearGaussianSsm model(MatrixXd::Identity(1, 1),
                            1e-24 * MatrixXd::Identity(1, 1),
                            MatrixXd::Identity(1, 1),
                            3.0 * MatrixXd::Identity(1, 1), VectorXd::Zero(1),
                            10.0 * MatrixXd::Identity(1, 1));
    std::vector<VectorXd> ys(1, y * VectorXd::Ones(1));
    const auto res = kalman_filter(model, ys);
    CHECK(res.means[0](0) == Catch::Approx(10.0 * y / 13.0).margin(1e-12));
    CHECK(res.covs[0](0, 0) == Catch::Approx(30.0 / 13.0).margin(1e-10));
  }
}

TEST_CASE("static gaussian target densities") {
  const double y = 1.3;
  const auto t = static_gaussian_target(10.0, 3.0, y);
  RngStream rng(9, 0);
  for (int i = 0; i < 50; ++i) {
    const double x = 4.0 * rng.normal();
    CHECK(t.log_target_u(x) ==
          Catch::Approx(normal_logpdf(x, 0.0, 10.0) +
                        normal_logpdf(y, x, 3.0))
              .margin(1e-12));
    CHECK(t.log_proposal(x) ==
          Catch::Approx(normal_logpdf(x, 0.0, 10.0)).margin(1e-12));
    CHECK(t.log_ratio_at(x) ==
          Catch::Approx(t.log_target_u(x) - t.log_proposal(x)).margin(1e-12));
  }
  CHECK(static_gaussian_posterior_mean(10.0, 3.0, 0.0) == 0.0);
  CHECK(static_gaussian_posterior_var(10.0, 3.0) ==
        Catch::Approx(30.0 / 13.0).margin(1e-14));
  CHECK_THROWS_AS(static_gaussian_target(-1.0, 3.0, 0.0),
                  std::invalid_argument);
}
