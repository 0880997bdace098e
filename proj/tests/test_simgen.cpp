#include "mbsts/error.hpp"
#include "mbsts/simgen.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace mbsts;

namespace {

double correlation(const VectorXd& a, const VectorXd& b) {
  const VectorXd x = a.array() - a.mean(), y = b.array() - b.mean();
  return x.dot(y) / std::sqrt(x.squaredNorm() * y.squaredNorm());
}

}  // namespace

TEST_CASE("zero coefficients contribute nothing") {
  const auto ds = generate_model(1, 50, 1);
  CHECK(ds.beta(3) == 0.0);
  CHECK(ds.beta(6) == 0.0);
  CHECK((ds.x_blocks[0].col(3) * ds.beta(3)).isZero());
  CHECK((ds.x_blocks[1].col(2) * ds.beta(6)).isZero());
  VectorXd b(8);
  b << 2, -1, -0.5, 0, -1.5, 4, 0, 2.5;
  CHECK(ds.beta == b);
}

TEST_CASE("recorded inclusion truth matches the coefficient zeros") {
  for (int id = 1; id <= 7; ++id) {
    const auto ds = generate_model(id, 30, 2);
    for (int k = 0; k < ds.beta.size(); ++k) CHECK(ds.gamma_true.flat(k) == (ds.beta(k) != 0.0));
  }
}

TEST_CASE("model dimensions and settings") {
  const auto m5 = generate_model(5, 20, 3);
  MatrixXd s(3, 3);
  s << 1.1, 0.7, 0.7, 0.7, 0.9, 0.7, 0.7, 0.7, 1.0;
  CHECK(m5.sigma_eps == s);
  CHECK(m5.y.cols() == 3);
  CHECK(generate_model(6, 20, 3).y.cols() == 4);

  const auto m1 = generate_model(1, 20, 3);
  MatrixXd s2(2, 2);
  s2 << 1.1, 0.7, 0.7, 0.9;
  CHECK(m1.sigma_eps == s2);
  CHECK_FALSE(m1.spec.series[1].has_slope);
  CHECK(generate_model(3, 20, 3).spec.series[0].seasonal_period == 4);
  CHECK(generate_model(4, 20, 3).spec.series[1].has_cycle());

  CHECK_THROWS_AS(generate_model(8, 20, 3), ConfigError);
  CHECK_THROWS_AS(generate_model(0, 20, 3), ConfigError);
  CHECK_THROWS_AS(generate_model(1, 1, 3), ConfigError);
}

TEST_CASE("same seed gives the same dataset") {
  const auto a = generate_model(7, 100, 9);
  const auto b = generate_model(7, 100, 9);
  CHECK(a.y == b.y);
  CHECK(a.x_blocks[0] == b.x_blocks[0]);
  CHECK(a.states == b.states);
  CHECK(generate_model(7, 100, 10).y != a.y);
}

TEST_CASE("starred predictors are shuffled in their tail only") {
  const int n = 200;
  const auto ds = generate_model(7, n, 4);
  REQUIRE(ds.predictor_names[0][1] == "x2s");
  REQUIRE(ds.predictor_names[0][4] == "x5s");
  REQUIRE(ds.predictor_names[0][7] == "x8s");
  CHECK(ds.x_blocks[0] == ds.x_blocks[1]);
  // training differs from generation for x2*, x5* in series 1 and x5*, x8* in series 2
  const std::vector<bool> want{false, true, false, false, true, false, false, false,
                               false, false, false, false, true, false, false, true};
  CHECK(ds.mismatched == want);

  SimOptions none;
  none.shuffle_fraction = 0.0;
  const auto plain = generate_model(7, n, 4, none);
  for (int c : {1, 4, 7}) {
    const VectorXd orig = plain.x_blocks[0].col(c);
    const VectorXd star = ds.x_blocks[0].col(c);
    CHECK(star.head(n / 2) == orig.head(n / 2));
    std::vector<double> a(orig.data() + n / 2, orig.data() + n), b(star.data() + n / 2, star.data() + n);
    CHECK(a != b);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
  }
  CHECK(std::none_of(plain.mismatched.begin(), plain.mismatched.end(), [](bool v) { return v; }));
}

TEST_CASE("correlation override") {
  const int n = 10000;
  SimOptions zero;
  zero.correlation = 0.0;
  const auto a = generate_model(7, n, 5, zero);
  CHECK(std::abs(correlation(a.noise.col(0), a.noise.col(1))) < 3.0 / std::sqrt(n));

  SimOptions high;
  high.correlation = 0.8;
  const auto b = generate_model(7, n, 5, high);
  CHECK(b.sigma_eps(0, 1) == doctest::Approx(0.8 * std::sqrt(1.1 * 0.9)));
  CHECK(std::abs(correlation(b.noise.col(0), b.noise.col(1)) - 0.8) < 3.0 * (1 - 0.64) / std::sqrt(n));

  SimOptions bad;
  bad.correlation = -0.6;
  CHECK_THROWS_AS(generate_model(6, 50, 5, bad), ConfigError);  // 4 x 4 all -0.6 is indefinite
}

TEST_CASE("observation errors converge to the stated covariance") {
  const int n = 10000;
  const auto ds = generate_model(5, n, 6);
  const MatrixXd c = ds.noise.transpose() * ds.noise / n;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double s = ds.sigma_eps(i, j);
      const double se = std::sqrt((s * s + ds.sigma_eps(i, i) * ds.sigma_eps(j, j)) / n);
      CHECK(std::abs(c(i, j) - s) < 3.0 * se);
    }
}

TEST_CASE("zero state variances leave regression plus noise") {
  CustomProcess p;
  ComponentConfig c;
  c.has_trend = true;
  p.spec.series = {c, c};
  p.spec.predictor_counts = {2, 1};
  p.beta = Eigen::Vector3d(1.0, -2.0, 0.5);
  p.sigma_eps = MatrixXd::Identity(2, 2);
  p.theta = ComponentCovariances::uniform(p.spec, 0.0);
  const auto ds = generate_custom(p, 40, 7);
  // the level never moves from its initial draw
  for (int t = 1; t < 40; ++t) CHECK(ds.states.row(t) == ds.states.row(0));
  MatrixXd fit(40, 2);
  fit.col(0) = ds.x_blocks[0] * p.beta.head(2);
  fit.col(1) = ds.x_blocks[1] * p.beta(2);
  const MatrixXd rest = ds.y - fit - ds.noise;
  CHECK((rest.col(0).array() - ds.states(0, 0)).abs().maxCoeff() < 1e-12);
  CHECK((rest.col(1).array() - ds.states(0, 1)).abs().maxCoeff() < 1e-12);

  p.theta.variance.clear();
  p.spec.series = {ComponentConfig{}, ComponentConfig{}};
  p.theta = ComponentCovariances::uniform(p.spec, 0.0);
  const auto flat = generate_custom(p, 40, 7);
  CHECK((flat.y - fit - flat.noise).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("seasonal component averages out over each period") {
  const auto ds = generate_model(3, 400, 8);
  // state index 2 is the current seasonal effect of series 1
  const VectorXd tau = ds.states.col(2);
  double worst = 0.0;
  for (int t = 0; t + 4 <= 400; ++t) worst = std::max(worst, std::abs(tau.segment(t, 4).mean()));
  // each window sum is one N(0, 0.01^2) shock; 5 sd over 400 windows
  CHECK(worst < 5.0 * 0.01 / 4.0);
  CHECK(tau.cwiseAbs().maxCoeff() > 0.1);  // the pattern itself is not small
}
