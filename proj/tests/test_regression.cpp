#include "mbsts/error.hpp"
#include "mbsts/random.hpp"
#include "mbsts/regression.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <map>

using namespace mbsts;

namespace {

MatrixXd gaussian(Rng& rng, int rows, int cols) {
  MatrixXd a(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) a(i, j) = rng.normal();
  return a;
}

PriorSet flat_priors(const std::vector<int>& counts, double pi, double kappa, double v0, const MatrixXd& v0_scale) {
  PriorSet p;
  int k = 0;
  for (int c : counts) {
    p.inclusion_prob.push_back(VectorXd::Constant(c, pi));
    k += c;
  }
  p.prior_mean = VectorXd::Zero(k);
  p.kappa = kappa;
  p.omega = 0.5;
  p.v0 = v0;
  p.V0 = v0_scale;
  return p;
}

struct Toy {
  RegressionData data;
  RegressionDesign design;
  MatrixXd sigma;
};

Toy make_toy(Rng& rng, int n, std::vector<int> counts, const VectorXd& beta, const MatrixXd& sigma) {
  Toy t;
  for (int c : counts) t.data.x_blocks.push_back(gaussian(rng, n, c));
  t.design = RegressionDesign(t.data.x_blocks);
  const MatrixXd l = sigma.llt().matrixL();
  t.data.y_star = t.design.fit(beta) + gaussian(rng, n, static_cast<int>(counts.size())) * l.transpose();
  t.sigma = sigma;
  return t;
}

InclusionVector gamma_from_mask(const std::vector<int>& counts, unsigned mask) {
  auto g = InclusionVector::filled(counts, false);
  for (int k = 0; k < g.total(); ++k) g.set_flat(k, (mask >> k) & 1u);
  return g;
}

}  // namespace

TEST_CASE("prior elicitation") {
  const auto p = elicit_priors({3, 3}, {1.5, 3.0}, 0.8, 5.0, MatrixXd::Identity(2, 2));
  CHECK(p.V0.isApprox(0.4 * MatrixXd::Identity(2, 2)));
  CHECK(p.inclusion_prob[0].isApprox(VectorXd::Constant(3, 0.5)));
  CHECK(p.inclusion_prob[1].isApprox(VectorXd::Constant(3, 1.0)));
  CHECK(p.prior_mean.isZero());
  const auto q = elicit_priors({2, 2}, {1, 1}, 1.0 - 1e-12, 5.0, MatrixXd::Identity(2, 2));
  CHECK(q.V0.norm() < 1e-10);
  CHECK_THROWS_AS(elicit_priors({2, 2}, {1, 1}, 0.5, 3.0, MatrixXd::Identity(2, 2)), ConfigError);
  CHECK_THROWS_AS(elicit_priors({2, 2}, {3, 1}, 0.5, 5.0, MatrixXd::Identity(2, 2)), ConfigError);
}

TEST_CASE("slab information matrix") {
  MatrixXd x = MatrixXd::Zero(4, 2);
  x << 1, 1, 1, -1, 1, 1, 1, -1;  // X^T X = 4 I
  CHECK(slab_information_matrix(x, 2.0, 0.5, 4).isApprox(2.0 * MatrixXd::Identity(2, 2)));

  Rng rng(1);
  MatrixXd dup(20, 3);
  dup.leftCols(2) = gaussian(rng, 20, 2);
  dup.col(2) = dup.col(0);
  const MatrixXd a = slab_information_matrix(dup, 1.0, 0.5, 20);
  const MatrixXd g = dup.transpose() * dup;
  MatrixXd expected = 0.5 * g;
  expected.diagonal() += 0.5 * g.diagonal();
  CHECK(a.isApprox(expected / 20.0));
  CHECK(a.llt().info() == Eigen::Success);

  CHECK(slab_information_matrix(MatrixXd(5, 0), 1.0, 0.5, 5).size() == 0);

  MatrixXd zero_col = gaussian(rng, 10, 2);
  zero_col.col(1).setZero();
  try {
    slab_information_matrix(zero_col, 1.0, 1.0, 10);
    FAIL("expected an error");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("column 1") != std::string::npos);
  }
}

TEST_CASE("zero predictor column is reported by series and predictor") {
  Rng rng(2);
  std::vector<MatrixXd> blocks{gaussian(rng, 10, 2), gaussian(rng, 10, 2)};
  blocks[1].col(0).setZero();
  RegressionDesign design(blocks);
  auto pri = flat_priors({2, 2}, 0.5, 1.0, 4.0, MatrixXd::Identity(2, 2));
  pri.omega = 1.0;
  ConditionalRegression cond(design, gaussian(rng, 10, 2), MatrixXd::Identity(2, 2), pri);
  try {
    cond.log_score(gamma_from_mask({2, 2}, 0b0100));
    FAIL("expected an error");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("series 2, predictor 1") != std::string::npos);
  }
}

TEST_CASE("whitening") {
  Rng rng(3);
  RegressionData data{gaussian(rng, 6, 2), {gaussian(rng, 6, 2), gaussian(rng, 6, 3)}};

  const auto id = whiten(data, MatrixXd::Identity(2, 2));
  CHECK(id.y.head(6).isApprox(data.y_star.col(0)));
  CHECK(id.y.tail(6).isApprox(data.y_star.col(1)));
  CHECK(id.x.isApprox(oracle::dense_x(data.x_blocks)));

  MatrixXd diag = MatrixXd::Zero(2, 2);
  diag.diagonal() << 4.0, 9.0;
  const auto dw = whiten(data, diag);
  CHECK(dw.y.head(6).isApprox(data.y_star.col(0) / 2.0));
  CHECK(dw.y.tail(6).isApprox(data.y_star.col(1) / 3.0));
  CHECK(dw.x.block(6, 2, 6, 3).isApprox(data.x_blocks[1] / 3.0));

  MatrixXd s(2, 2);
  s << 1.0, 0.7, 0.7, 1.0;
  const auto w = whiten(data, s);
  const auto [oy, ox] = oracle::dense_whiten(data.y_star, data.x_blocks, s);
  CHECK((w.y - oy).norm() < 1e-12);
  CHECK((w.x - ox).norm() < 1e-12);

  // un-whiten with U^T blockwise
  const MatrixXd ut = MatrixXd(s.llt().matrixU()).transpose();
  VectorXd back = VectorXd::Zero(12);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) back.segment(i * 6, 6) += ut(i, j) * w.y.segment(j * 6, 6);
  VectorXd vec(12);
  vec << data.y_star.col(0), data.y_star.col(1);
  CHECK((back - vec).norm() < 1e-10);

  CHECK_THROWS_AS(whiten(data, -s), NumericError);
}

TEST_CASE("whitened residuals are uncorrelated") {
  Rng rng(4);
  const int n = 10000;
  MatrixXd s(2, 2);
  s << 1.0, 0.7, 0.7, 1.0;
  const MatrixXd l = s.llt().matrixL();
  RegressionData data{gaussian(rng, n, 2) * l.transpose(), {MatrixXd(n, 0), MatrixXd(n, 0)}};
  const auto w = whiten(data, s);
  MatrixXd e(n, 2);
  e.col(0) = w.y.head(n);
  e.col(1) = w.y.tail(n);
  const MatrixXd c = e.transpose() * e / n;
  // sd of a sample variance ~ sqrt(2/n), of a sample covariance ~ sqrt(1/n)
  CHECK(std::abs(c(0, 0) - 1.0) < 3.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(c(1, 1) - 1.0) < 3.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(c(0, 1)) < 3.0 * std::sqrt(1.0 / n));
}

TEST_CASE("conditional cross products match the dense whitened system") {
  Rng rng(5);
  VectorXd beta(5);
  beta << 1, -1, 0.5, 2, 0;
  MatrixXd s(2, 2);
  s << 2.0, -0.6, -0.6, 1.0;
  const auto toy = make_toy(rng, 15, {2, 3}, beta, s);
  const auto pri = flat_priors({2, 3}, 0.5, 1.0, 4.0, MatrixXd::Identity(2, 2));
  ConditionalRegression cond(toy.design, toy.data.y_star, s, pri);
  const auto [oy, ox] = oracle::dense_whiten(toy.data.y_star, toy.data.x_blocks, s);
  CHECK((cond.whitened_gram() - ox.transpose() * ox).norm() < 1e-10 * ox.squaredNorm());
  CHECK((cond.whitened_cross() - ox.transpose() * oy).norm() < 1e-10 * std::max(1.0, (ox.transpose() * oy).norm()));
}

TEST_CASE("coefficient draws match analytic moments") {
  Rng rng(6);
  VectorXd beta(3);
  beta << 1.0, -2.0, 0.5;
  MatrixXd s = MatrixXd::Constant(1, 1, 1.5);
  const auto toy = make_toy(rng, 50, {3}, beta, s);
  const auto pri = flat_priors({3}, 0.5, 1.0, 3.0, MatrixXd::Identity(1, 1));
  ConditionalRegression cond(toy.design, toy.data.y_star, s, pri);
  const auto gamma = InclusionVector::filled({3}, true);

  // analytic oracle from the dense whitened system
  const auto [oy, ox] = oracle::dense_whiten(toy.data.y_star, toy.data.x_blocks, s);
  const MatrixXd a = pri.kappa * toy.data.x_blocks[0].transpose() * toy.data.x_blocks[0] / 50.0;
  const MatrixXd cov = (ox.transpose() * ox + a).inverse();
  const VectorXd mean = cov * (ox.transpose() * oy);

  const int draws = 10000;
  MatrixXd samples(draws, 3);
  Rng drng(60);
  for (int r = 0; r < draws; ++r) samples.row(r) = cond.draw_beta(gamma, drng).transpose();
  const VectorXd emp_mean = samples.colwise().mean().transpose();
  const MatrixXd centred = samples.rowwise() - emp_mean.transpose();
  const MatrixXd emp_cov = centred.transpose() * centred / (draws - 1);
  for (int j = 0; j < 3; ++j) {
    CHECK(std::abs(emp_mean(j) - mean(j)) < 3.0 * std::sqrt(cov(j, j) / draws));
    for (int k = 0; k < 3; ++k) {
      // sd of a sample covariance of Gaussians: sqrt((s_jk^2 + s_jj s_kk)/N)
      const double se = std::sqrt((cov(j, k) * cov(j, k) + cov(j, j) * cov(k, k)) / draws);
      CHECK(std::abs(emp_cov(j, k) - cov(j, k)) < 3.0 * se);
    }
  }
}

TEST_CASE("coefficient draws: exclusions, strong prior, noiseless GLS") {
  Rng rng(7);
  VectorXd beta(4);
  beta << 1.0, 0.0, -1.0, 3.0;
  MatrixXd s(2, 2);
  s << 1.0, 0.4, 0.4, 2.0;
  auto toy = make_toy(rng, 30, {2, 2}, beta, s);
  auto pri = flat_priors({2, 2}, 0.5, 1.0, 4.0, MatrixXd::Identity(2, 2));

  const auto g = gamma_from_mask({2, 2}, 0b1101);
  {
    ConditionalRegression cond(toy.design, toy.data.y_star, s, pri);
    Rng drng(1);
    for (int r = 0; r < 50; ++r) CHECK(cond.draw_beta(g, drng)(1) == 0.0);
    Rng a(9), b(9);
    CHECK(cond.draw_beta(g, a) == cond.draw_beta(g, b));
  }
  {
    pri.prior_mean << 0.3, 0.0, -0.7, 0.1;
    pri.kappa = 1e9;
    ConditionalRegression cond(toy.design, toy.data.y_star, s, pri);
    Rng drng(2);
    VectorXd sum = VectorXd::Zero(4);
    for (int r = 0; r < 10000; ++r) sum += cond.draw_beta(g, drng);
    VectorXd expected = pri.prior_mean;
    expected(1) = 0.0;
    CHECK((sum / 10000.0 - expected).cwiseAbs().maxCoeff() < 1e-4);
  }
  {
    toy.data.y_star = toy.design.fit(beta);
    pri.prior_mean.setZero();
    pri.kappa = 1e-10;
    ConditionalRegression cond(toy.design, toy.data.y_star, s, pri);
    const auto post = cond.posterior(InclusionVector::filled({2, 2}, true));
    CHECK((post.mean - beta).norm() < 1e-6);
  }
}

TEST_CASE("observation covariance draws") {
  Rng rng(8);
  VectorXd beta(2);
  beta << 1.0, -1.0;
  MatrixXd s(2, 2);
  s << 1.0, 0.3, 0.3, 0.5;
  const auto toy = make_toy(rng, 25, {1, 1}, beta, s);
  MatrixXd v0 = MatrixXd::Identity(2, 2) * 0.7;
  const auto pri = flat_priors({1, 1}, 0.5, 1.0, 5.0, v0);
  const auto g = InclusionVector::filled({1, 1}, true);
  const MatrixXd e = toy.data.y_star - toy.design.fit(beta);
  const MatrixXd scale = e.transpose() * e + v0;
  const double df = 5.0 + 25.0;
  const MatrixXd mean = scale / (df - 3.0);

  const int draws = 10000;
  MatrixXd sum = MatrixXd::Zero(2, 2), sumsq = MatrixXd::Zero(2, 2);
  Rng drng(80);
  for (int r = 0; r < draws; ++r) {
    const MatrixXd d = draw_sigma_eps(toy.design, toy.data.y_star, beta, g, pri, drng);
    CHECK_FALSE(d.llt().info() != Eigen::Success);
    sum += d;
    sumsq += d.cwiseProduct(d);
  }
  const MatrixXd emp = sum / draws;
  const MatrixXd var = sumsq / draws - emp.cwiseProduct(emp);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(std::abs(emp(i, j) - mean(i, j)) < 3.0 * std::sqrt(var(i, j) / draws));

  // zero residuals: posterior is IW(v0 + n, V0)
  Rng a(3), b(3);
  const MatrixXd exact = draw_sigma_eps(toy.design, toy.design.fit(beta), beta, g, pri, a);
  CHECK(exact.isApprox(draw_inverse_wishart(b, df, v0)));

  VectorXd bad = beta;
  CHECK_THROWS_AS(draw_sigma_eps(toy.design, toy.data.y_star, bad, gamma_from_mask({1, 1}, 0b01), pri, a),
                  DimensionError);
}

TEST_CASE("inclusion score against the conjugate marginal") {
  Rng rng(9);
  VectorXd beta(3);
  beta << 0.8, 0.0, -0.5;
  MatrixXd s(2, 2);
  s << 1.0, 0.5, 0.5, 1.5;
  const auto toy = make_toy(rng, 10, {2, 1}, beta, s);
  auto pri = flat_priors({2, 1}, 0.3, 2.0, 4.0, MatrixXd::Identity(2, 2));
  pri.prior_mean << 0.2, -0.1, 0.0;

  // the unknown constant cancels: compare differences against the empty model
  const auto empty = gamma_from_mask({2, 1}, 0);
  const double base = gamma_log_score(empty, s, toy.data, pri);
  const double oracle_base = oracle::log_gamma_posterior(empty, toy.data, s, pri);
  CHECK(base == doctest::Approx(3.0 * std::log(0.7)));
  for (unsigned mask = 1; mask < 8; ++mask) {
    const auto g = gamma_from_mask({2, 1}, mask);
    const double diff = gamma_log_score(g, s, toy.data, pri) - base;
    const double want = oracle::log_gamma_posterior(g, toy.data, s, pri) - oracle_base;
    CHECK(diff == doctest::Approx(want).epsilon(1e-9));
  }

  pri.inclusion_prob[1](0) = 0.0;
  CHECK(gamma_log_score(gamma_from_mask({2, 1}, 0b100), s, toy.data, pri) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("pinned inclusion probabilities") {
  Rng rng(10);
  const auto toy = make_toy(rng, 20, {3, 2}, VectorXd::Ones(5), MatrixXd::Identity(2, 2));
  auto pri = flat_priors({3, 2}, 0.0, 1.0, 4.0, MatrixXd::Identity(2, 2));
  ConditionalRegression off(toy.design, toy.data.y_star, toy.sigma, pri);
  SsvsStats stats;
  auto g = draw_gamma(InclusionVector::filled({3, 2}, true), off, rng, &stats);
  CHECK(g.count_included() == 0);
  CHECK(stats.proposals == 0);

  pri = flat_priors({3, 2}, 1.0, 1.0, 4.0, MatrixXd::Identity(2, 2));
  ConditionalRegression on(toy.design, toy.data.y_star, toy.sigma, pri);
  g = draw_gamma(InclusionVector::filled({3, 2}, false), on, rng);
  CHECK(g.count_included() == 5);
}

TEST_CASE("SSVS sweeps reproduce enumerated subset probabilities") {
  Rng rng(11);
  VectorXd beta(4);
  beta << 0.4, 0.0, -0.3, 0.2;
  MatrixXd s(2, 2);
  s << 1.0, 0.3, 0.3, 1.0;
  const auto toy = make_toy(rng, 12, {2, 2}, beta, s);
  const auto pri = flat_priors({2, 2}, 0.5, 1.0, 4.0, MatrixXd::Identity(2, 2));
  ConditionalRegression cond(toy.design, toy.data.y_star, s, pri);

  std::vector<double> exact(16);
  double mx = -std::numeric_limits<double>::infinity();
  for (unsigned mask = 0; mask < 16; ++mask) {
    exact[mask] = oracle::log_gamma_posterior(gamma_from_mask({2, 2}, mask), toy.data, s, pri);
    mx = std::max(mx, exact[mask]);
  }
  double z = 0.0;
  for (auto& e : exact) z += (e = std::exp(e - mx));
  for (auto& e : exact) e /= z;

  const int sweeps = 40000;
  std::vector<double> freq(16, 0.0);
  auto g = InclusionVector::filled({2, 2}, false);
  Rng srng(12);
  for (int i = 0; i < sweeps; ++i) {
    g = draw_gamma(g, cond, srng);
    unsigned mask = 0;
    for (int k = 0; k < 4; ++k) mask |= static_cast<unsigned>(g.flat(k)) << k;
    freq[mask] += 1.0 / sweeps;
  }
  double tv = 0.0;
  for (int m = 0; m < 16; ++m) tv += 0.5 * std::abs(freq[m] - exact[m]);
  CHECK(tv < 0.02);
}

TEST_CASE("constant offsets in the score leave flip probabilities unchanged") {
  Rng rng(13);
  const auto toy = make_toy(rng, 15, {3}, VectorXd::Ones(3), MatrixXd::Identity(1, 1));
  const auto pri = flat_priors({3}, 0.4, 1.0, 3.0, MatrixXd::Identity(1, 1));
  ConditionalRegression cond(toy.design, toy.data.y_star, toy.sigma, pri);
  // the library's score and the dense marginal differ by a (Sigma, Y*) constant
  for (unsigned mask = 0; mask < 8; ++mask) {
    if (mask & 1u) continue;
    const auto g0 = gamma_from_mask({3}, mask);
    const auto g1 = gamma_from_mask({3}, mask | 1u);
    const double p_lib = 1.0 / (1.0 + std::exp(cond.log_score(g0) - cond.log_score(g1)));
    const double p_oracle = 1.0 / (1.0 + std::exp(oracle::log_gamma_posterior(g0, toy.data, toy.sigma, pri) -
                                                  oracle::log_gamma_posterior(g1, toy.data, toy.sigma, pri)));
    CHECK(p_lib == doctest::Approx(p_oracle).epsilon(1e-9));
  }
}
