// Joint-distribution ("getting it right") check of the full Gibbs cycle on a
// tiny level-plus-regression model. Marginal draws come straight from the
// prior using standard-library distributions; the coupled chain alternates
// data simulation with one sampler step.
#pragma once

#include "mbsts/gibbs.hpp"
#include "mbsts/random.hpp"
#include "mbsts/regression.hpp"
#include "mbsts/statespace.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace geweke {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Setup {
  int n = 8;
  int k = 2;
  double level_df = 10.0, level_scale = 5.0;  // IG(w/2, W/2)
  double v0 = 10.0, v0_scale = 8.0;           // IW(v0, V0), m = 1
  double pi = 0.5;
  double kappa = 1.0;
  double init_var = 1.0;
};

struct Stat {
  std::string name;
  double forward_mean = 0, forward_se = 0;
  double chain_mean = 0, chain_se = 0;
  double z() const { return (forward_mean - chain_mean) / std::sqrt(forward_se * forward_se + chain_se * chain_se); }
};

inline mbsts::ModelSpec spec_of(const Setup& s) {
  mbsts::ModelSpec spec;
  mbsts::ComponentConfig c;
  c.has_trend = true;
  spec.series = {c};
  spec.predictor_counts = {s.k};
  return spec;
}

inline mbsts::PriorSet priors_of(const Setup& s) {
  mbsts::PriorSet p;
  p.inclusion_prob = {VectorXd::Constant(s.k, s.pi)};
  p.prior_mean = VectorXd::Zero(s.k);
  p.kappa = s.kappa;
  p.omega = 0.5;
  p.v0 = s.v0;
  p.V0 = MatrixXd::Constant(1, 1, s.v0_scale);
  auto& lp = p.component(mbsts::ComponentKind::level);
  lp.df = s.level_df;
  lp.scale = {s.level_scale};
  return p;
}

// theta, sigma, beta_1..k, gamma_1..k, beta_1^2..
inline VectorXd statistics(double theta, double sigma, const VectorXd& beta, const VectorXd& gamma) {
  const auto k = beta.size();
  VectorXd g(2 + 3 * k);
  g << theta, sigma, beta, gamma, beta.cwiseProduct(beta);
  return g;
}

inline std::vector<std::string> statistic_names(int k) {
  std::vector<std::string> names{"level variance", "obs variance"};
  for (int j = 0; j < k; ++j) names.push_back("beta_" + std::to_string(j + 1));
  for (int j = 0; j < k; ++j) names.push_back("gamma_" + std::to_string(j + 1));
  for (int j = 0; j < k; ++j) names.push_back("beta_" + std::to_string(j + 1) + "^2");
  return names;
}

struct Prior {
  double theta, sigma;
  VectorXd beta, gamma;
};

inline Prior draw_prior(const Setup& s, const MatrixXd& x, std::mt19937_64& eng) {
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud;
  Prior p;
  p.theta = 1.0 / std::gamma_distribution<double>(0.5 * s.level_df, 2.0 / s.level_scale)(eng);
  p.sigma = 1.0 / std::gamma_distribution<double>(0.5 * s.v0, 2.0 / s.v0_scale)(eng);
  p.gamma = VectorXd::Zero(s.k);
  p.beta = VectorXd::Zero(s.k);
  std::vector<int> idx;
  for (int j = 0; j < s.k; ++j) {
    if (ud(eng) < s.pi) {
      p.gamma(j) = 1.0;
      idx.push_back(j);
    }
  }
  if (!idx.empty()) {
    MatrixXd xg(x.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t a = 0; a < idx.size(); ++a) xg.col(static_cast<Eigen::Index>(a)) = x.col(idx[a]);
    const MatrixXd a = s.kappa * xg.transpose() * xg / static_cast<double>(s.n);
    // beta ~ N(0, A^{-1}): solve L^T b = z with A = L L^T
    Eigen::LLT<MatrixXd> llt(a);
    VectorXd z(static_cast<Eigen::Index>(idx.size()));
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = nd(eng);
    const VectorXd b = llt.matrixU().solve(z);
    for (std::size_t a2 = 0; a2 < idx.size(); ++a2) p.beta(idx[a2]) = b(static_cast<Eigen::Index>(a2));
  }
  return p;
}

inline VectorXd simulate_level(const Setup& s, double theta, std::mt19937_64& eng) {
  std::normal_distribution<double> nd;
  VectorXd a(s.n);
  a(0) = std::sqrt(s.init_var) * nd(eng);
  for (int t = 1; t < s.n; ++t) a(t) = a(t - 1) + std::sqrt(theta) * nd(eng);
  return a;
}

inline VectorXd simulate_y(const MatrixXd& x, const VectorXd& level, const VectorXd& beta, double sigma,
                           std::mt19937_64& eng) {
  std::normal_distribution<double> nd;
  VectorXd y = level + x * beta;
  for (Eigen::Index t = 0; t < y.size(); ++t) y(t) += std::sqrt(sigma) * nd(eng);
  return y;
}

// Mean and standard error; batch means when `batches` > 0 to absorb
// autocorrelation in the coupled chain.
inline std::pair<double, double> mean_se(const std::vector<double>& v, int batches) {
  const auto n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x / n;
  if (batches <= 0) {
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
  }
  const std::size_t size = v.size() / static_cast<std::size_t>(batches);
  double ss = 0.0;
  for (int b = 0; b < batches; ++b) {
    double bm = 0.0;
    for (std::size_t i = 0; i < size; ++i) bm += v[static_cast<std::size_t>(b) * size + i];
    bm /= static_cast<double>(size);
    ss += (bm - mean) * (bm - mean);
  }
  return {mean, std::sqrt(ss / (batches - 1.0) / batches)};
}

inline std::vector<Stat> run(const Setup& s, int forward_draws, int chain_steps, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> nd;
  MatrixXd x(s.n, s.k);
  for (int t = 0; t < s.n; ++t)
    for (int j = 0; j < s.k; ++j) x(t, j) = nd(eng);

  const auto names = statistic_names(s.k);
  const auto dims = names.size();
  std::vector<std::vector<double>> fwd(dims), chn(dims);

  for (int r = 0; r < forward_draws; ++r) {
    const auto p = draw_prior(s, x, eng);
    const VectorXd g = statistics(p.theta, p.sigma, p.beta, p.gamma);
    for (std::size_t i = 0; i < dims; ++i) fwd[i].push_back(g(static_cast<Eigen::Index>(i)));
  }

  const auto spec = spec_of(s);
  const auto priors = priors_of(s);
  const mbsts::GibbsSampler sampler(spec, priors, {x}, s.n, mbsts::InitialStatePrior{0.0, s.init_var});
  mbsts::Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);

  auto p0 = draw_prior(s, x, eng);
  mbsts::ChainState st;
  st.theta.variance.resize(1);
  st.theta.at(0, mbsts::ComponentKind::level) = p0.theta;
  st.sigma_eps = MatrixXd::Constant(1, 1, p0.sigma);
  st.beta = p0.beta;
  st.gamma = mbsts::InclusionVector::filled({s.k}, false);
  for (int j = 0; j < s.k; ++j) st.gamma.set_flat(j, p0.gamma(j) > 0.5);
  VectorXd level = simulate_level(s, p0.theta, eng);

  for (int it = 0; it < chain_steps; ++it) {
    const VectorXd y = simulate_y(x, level, st.beta, st.sigma_eps(0, 0), eng);
    const MatrixXd alpha = sampler.step(MatrixXd(y), st, rng);
    level = alpha.col(0);
    VectorXd gam(s.k);
    for (int j = 0; j < s.k; ++j) gam(j) = st.gamma.flat(j) ? 1.0 : 0.0;
    const VectorXd g =
        statistics(*st.theta.at(0, mbsts::ComponentKind::level), st.sigma_eps(0, 0), st.beta, gam);
    for (std::size_t i = 0; i < dims; ++i) chn[i].push_back(g(static_cast<Eigen::Index>(i)));
  }

  std::vector<Stat> out;
  for (std::size_t i = 0; i < dims; ++i) {
    Stat st_i;
    st_i.name = names[i];
    std::tie(st_i.forward_mean, st_i.forward_se) = mean_se(fwd[i], 0);
    std::tie(st_i.chain_mean, st_i.chain_se) = mean_se(chn[i], 50);
    out.push_back(st_i);
  }
  return out;
}

}  // namespace geweke
