#include "mbsts/error.hpp"
#include "mbsts/random.hpp"
#include "mbsts/statespace.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace mbsts;

namespace {

ComponentConfig trend(bool slope, double rho = 1.0, double d = 0.0) {
  ComponentConfig c;
  c.has_trend = true;
  c.has_slope = slope;
  c.slope_learning_rate = rho;
  c.long_term_slope = d;
  return c;
}

ComponentConfig seasonal_only(int s) {
  ComponentConfig c;
  c.seasonal_period = s;
  return c;
}

ComponentConfig cycle_only(double lambda, double rho) {
  ComponentConfig c;
  c.cycle_frequency = lambda;
  c.cycle_damping = rho;
  return c;
}

ModelSpec spec_of(std::vector<ComponentConfig> series) {
  ModelSpec s;
  s.series = std::move(series);
  s.predictor_counts.assign(s.series.size(), 0);
  return s;
}

}  // namespace

TEST_CASE("dimension counting for trend+slope and trend-only series") {
  const auto spec = spec_of({trend(true), trend(false)});
  const auto ss = build_state_space(spec, ComponentCovariances::uniform(spec, 1.0));
  CHECK(ss.state_dim() == 3);
  CHECK(ss.disturbance_dim() == 3);
  CHECK(ss.Z.rows() == 3);
  CHECK(ss.Z.cols() == 2);
}

TEST_CASE("seasonal block has -1 along the top row and ones on the subdiagonal") {
  const auto spec = spec_of({seasonal_only(4)});
  const auto ss = build_state_space(spec, ComponentCovariances::uniform(spec, 1.0));
  MatrixXd expected(3, 3);
  expected << -1, -1, -1, 1, 0, 0, 0, 1, 0;
  CHECK(ss.T.isApprox(expected));
  CHECK(ss.disturbance_dim() == 1);
  CHECK(ss.R(0, 0) == 1.0);
  CHECK(ss.Z(0, 0) == 1.0);
  CHECK(ss.Z(1, 0) == 0.0);
}

TEST_CASE("cycle block for lambda = pi/2 and damping 0.5") {
  const auto spec = spec_of({cycle_only(std::numbers::pi / 2.0, 0.5)});
  const auto ss = build_state_space(spec, ComponentCovariances::uniform(spec, 1.0));
  CHECK(ss.T(0, 0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(ss.T(0, 1) == doctest::Approx(0.5));
  CHECK(ss.T(1, 0) == doctest::Approx(-0.5));
  CHECK(ss.T(1, 1) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(ss.Z(0, 0) == 1.0);
  CHECK(ss.Z(1, 0) == 0.0);
  CHECK(ss.disturbance_dim() == 2);
}

TEST_CASE("invalid configurations are rejected") {
  auto bad_season = spec_of({seasonal_only(1)});
  CHECK_THROWS_AS(build_state_space(bad_season, ComponentCovariances::uniform(bad_season, 1.0)), ConfigError);

  auto missing = spec_of({trend(true)});
  ComponentCovariances theta;
  theta.variance.resize(1);
  theta.at(0, ComponentKind::level) = 1.0;
  CHECK_THROWS_AS(build_state_space(missing, theta), ConfigError);

  CHECK_THROWS_AS(cycle_only(0.0, 0.5).validate(), ConfigError);
  CHECK_THROWS_AS(cycle_only(std::numbers::pi, 0.5).validate(), ConfigError);
  CHECK_THROWS_AS(cycle_only(1.0, 1.0).validate(), ConfigError);
  ComponentConfig slope_only;
  slope_only.has_slope = true;
  CHECK_THROWS_AS(slope_only.validate(), ConfigError);
  CHECK_THROWS_AS(trend(true, 1.5).validate(), ConfigError);
}

TEST_CASE("propagate") {
  SUBCASE("identity transition leaves the state unchanged") {
    StateSpaceSystem ss;
    ss.T = MatrixXd::Identity(3, 3);
    ss.intercept = VectorXd::Zero(3);
    ss.R = MatrixXd::Identity(3, 3);
    const VectorXd a = VectorXd::LinSpaced(3, 1.0, 3.0);
    CHECK(propagate(ss, a, VectorXd::Zero(3)) == a);
  }
  SUBCASE("level-only series adds the disturbance") {
    const auto spec = spec_of({trend(false)});
    const auto ss = build_state_space(spec, ComponentCovariances::uniform(spec, 1.0));
    CHECK(propagate(ss, VectorXd::Constant(1, 3.0), VectorXd::Constant(1, 0.5))(0) == 3.5);
  }
  SUBCASE("Model-2 trend matches the hand-written recursion") {
    const auto spec = spec_of({trend(true, 0.6, 0.02), trend(true, 1.0, 0.0)});
    const auto ss = build_state_space(spec, ComponentCovariances::uniform(spec, 1.0));
    VectorXd a(4);
    a << 1.5, 0.3, -2.0, 0.1;
    VectorXd eta(4);
    eta << 0.01, -0.02, 0.5, 0.04;
    const VectorXd next = propagate(ss, a, eta);
    CHECK(next(0) == doctest::Approx(1.5 + 0.3 + 0.01));
    CHECK(next(1) == doctest::Approx(0.6 * 0.3 + 0.4 * 0.02 - 0.02));
    CHECK(next(2) == doctest::Approx(-2.0 + 0.1 + 0.5));
    CHECK(next(3) == doctest::Approx(0.1 + 0.04));
  }
  SUBCASE("dimension mismatch") {
    const auto spec = spec_of({trend(false)});
    const auto ss = build_state_space(spec, ComponentCovariances::uniform(spec, 1.0));
    CHECK_THROWS_AS(propagate(ss, VectorXd::Zero(2), VectorXd::Zero(1)), DimensionError);
  }
}

TEST_CASE("observe") {
  const auto spec = spec_of({trend(false), trend(false)});
  const auto ss = build_state_space(spec, ComponentCovariances::uniform(spec, 1.0));
  CHECK(observe(ss, VectorXd::Zero(2), VectorXd::Zero(2)).isZero());
  VectorXd a(2), xi(2);
  a << 1.0, 2.0;
  xi << 10.0, 20.0;
  const VectorXd y = observe(ss, a, xi);
  CHECK(y(0) == 11.0);
  CHECK(y(1) == 22.0);
  CHECK_THROWS_AS(observe(ss, a, VectorXd::Zero(3)), DimensionError);

  auto cfg = trend(false);
  cfg.seasonal_period = 4;
  const auto sspec = spec_of({cfg});
  const auto sss = build_state_space(sspec, ComponentCovariances::uniform(sspec, 1.0));
  VectorXd s(4);
  s << 5.0, 0.7, -0.2, 0.1;  // level, then current and lagged seasonal effects
  CHECK(observe(sss, s, VectorXd::Zero(1))(0) == doctest::Approx(5.7));
}

TEST_CASE("seasonal blocks: top row sums to -(S-1) and the block is invertible") {
  for (int s = 2; s <= 12; ++s) {
    const auto spec = spec_of({seasonal_only(s)});
    const auto ss = build_state_space(spec, ComponentCovariances::uniform(spec, 1.0));
    CHECK(ss.T.row(0).sum() == doctest::Approx(-(s - 1)));
    CHECK(std::abs(ss.T.determinant()) > 0.5);
  }
}

TEST_CASE("cycle spectral radius equals the damping and noiseless paths decay") {
  for (double rho : {0.3, 0.5, 0.97}) {
    const auto spec = spec_of({cycle_only(0.7, rho)});
    const auto ss = build_state_space(spec, ComponentCovariances::uniform(spec, 1.0));
    const auto eig = ss.T.eigenvalues();
    for (Eigen::Index i = 0; i < eig.size(); ++i) CHECK(std::abs(eig(i)) == doctest::Approx(rho));
    VectorXd a(2);
    a << 1.0, -1.0;
    const double n0 = a.norm();
    for (int t = 1; t <= 20; ++t) {
      a = propagate(ss, a, VectorXd::Zero(2));
      CHECK(a.norm() == doctest::Approx(n0 * std::pow(rho, t)).epsilon(1e-9));
    }
  }
}

TEST_CASE("sum of S seasonal effects has zero mean under simulation") {
  const int period = 4;
  const auto spec = spec_of({seasonal_only(period)});
  const auto ss = build_state_space(spec, ComponentCovariances::uniform(spec, 0.25));
  Rng rng(11);
  const int reps = 20000;
  double sum = 0.0, sum2 = 0.0;
  for (int r = 0; r < reps; ++r) {
    VectorXd a = rng.normal_vector(period - 1);
    for (int t = 0; t < 10; ++t) a = propagate(ss, a, VectorXd::Constant(1, 0.5 * rng.normal()));
    // tau_{t+1} + tau_t + ... + tau_{t-S+2} is exactly the new disturbance
    const VectorXd next = propagate(ss, a, VectorXd::Constant(1, 0.5 * rng.normal()));
    const double s = next(0) + a.sum();
    sum += s;
    sum2 += s * s;
  }
  const double mean = sum / reps;
  const double se = std::sqrt((sum2 / reps - mean * mean) / reps);
  CHECK(std::abs(mean) < 3.0 * se);
}

TEST_CASE("build_state_space is deterministic") {
  auto c = trend(true, 0.6, 0.02);
  c.seasonal_period = 7;
  c.cycle_frequency = 0.3;
  c.cycle_damping = 0.8;
  const auto spec = spec_of({c, trend(false)});
  const auto a = build_state_space(spec, ComponentCovariances::uniform(spec, 0.3));
  const auto b = build_state_space(spec, ComponentCovariances::uniform(spec, 0.3));
  CHECK(a.T == b.T);
  CHECK(a.Z == b.Z);
  CHECK(a.R == b.R);
  CHECK(a.Q == b.Q);
  CHECK(a.intercept == b.intercept);
  CHECK(a.state_dim() == 2 + 6 + 2 + 1);
  CHECK(a.disturbance_dim() == 2 + 1 + 2 + 1);
}
