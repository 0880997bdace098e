#include "mbsts/gibbs.hpp"

#include "mbsts/error.hpp"
#include "mbsts/linalg.hpp"

#include <cmath>
#include <future>
#include <numbers>
#include <string>

namespace mbsts {

void TrainConfig::validate() const {
  if (total_draws < 1) throw ConfigError("total_draws must be at least 1");
  if (burn_in < 0 || burn_in >= total_draws) throw ConfigError("burn_in must lie in [0, total_draws)");
  if (chains < 1) throw ConfigError("chains must be at least 1");
  if (!(initial_state.variance > 0.0)) throw ConfigError("initial state variance must be positive");
}

ComponentCovariances theta_from_vector(const ModelSpec& spec, const VectorXd& values) {
  const auto params = variance_parameters(spec);
  if (values.size() != static_cast<Eigen::Index>(params.size())) {
    throw DimensionError("variance vector length does not match the model");
  }
  ComponentCovariances theta;
  theta.variance.resize(spec.series.size());
  for (std::size_t p = 0; p < params.size(); ++p) {
    theta.at(params[p].series, params[p].kind) = values(static_cast<Eigen::Index>(p));
  }
  return theta;
}

VectorXd theta_to_vector(const ModelSpec& spec, const ComponentCovariances& theta) {
  const auto params = variance_parameters(spec);
  VectorXd out(static_cast<Eigen::Index>(params.size()));
  for (std::size_t p = 0; p < params.size(); ++p) {
    const auto& v = theta.at(params[p].series, params[p].kind);
    if (!v) throw ConfigError("missing component variance");
    out(static_cast<Eigen::Index>(p)) = *v;
  }
  return out;
}

ComponentCovariances PosteriorDraws::theta_at(int draw) const {
  return theta_from_vector(spec, theta.row(draw).transpose());
}

InclusionVector PosteriorDraws::gamma_at(int draw) const {
  auto g = InclusionVector::filled(spec.predictor_counts, false);
  for (Eigen::Index k = 0; k < gamma.cols(); ++k) g.set_flat(static_cast<int>(k), gamma(draw, k) != 0.0);
  return g;
}

ChainState PosteriorDraws::state_at(int draw) const {
  return {theta_at(draw), gamma_at(draw), beta.row(draw).transpose(),
          sigma_eps[static_cast<std::size_t>(draw)]};
}

VectorXd PosteriorDraws::inclusion_frequencies() const {
  if (gamma.rows() == 0) return VectorXd::Zero(gamma.cols());
  return gamma.colwise().mean().transpose();
}

double component_prior_centre(const ComponentPrior& prior, int series) {
  const double w = prior.df;
  const double scale = prior.scale.at(static_cast<std::size_t>(series));
  return w > 2.0 ? scale / (w - 2.0) : scale / w;
}

ComponentCovariances draw_component_covariances(const MatrixXd& alpha, const StateSpaceSystem& ss,
                                                const ModelSpec& spec, const PriorSet& priors,
                                                Rng& rng) {
  const auto n = alpha.rows();
  if (n == 0) throw DimensionError("cannot draw component variances from an empty state path");
  if (alpha.cols() != ss.state_dim()) throw DimensionError("state path width differs from the state dimension");

  const int m = spec.m();
  std::vector<std::array<double, 4>> ss_sum(static_cast<std::size_t>(m), {0, 0, 0, 0});
  std::vector<std::array<int, 4>> count(static_cast<std::size_t>(m), {0, 0, 0, 0});
  for (Eigen::Index t = 0; t + 1 < n; ++t) {
    const VectorXd resid = alpha.row(t + 1).transpose() - ss.T * alpha.row(t).transpose() - ss.intercept;
    for (const auto& slot : ss.slots) {
      const double r = resid(slot.state_index);
      const auto s = static_cast<std::size_t>(slot.series);
      const auto k = static_cast<std::size_t>(slot.kind);
      ss_sum[s][k] += r * r;
      count[s][k] += 1;
    }
  }

  ComponentCovariances theta;
  theta.variance.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    for (auto kind : kAllComponents) {
      if (!spec.series[static_cast<std::size_t>(i)].has(kind)) continue;
      const auto& prior = priors.component(kind);
      const auto k = static_cast<std::size_t>(kind);
      const auto s = static_cast<std::size_t>(i);
      const double shape = 0.5 * (prior.df + count[s][k]);
      const double scale = 0.5 * (prior.scale.at(s) + ss_sum[s][k]);
      theta.at(i, kind) = draw_inverse_gamma(rng, shape, scale);
    }
  }
  return theta;
}

ChainState initialize_chain(const ModelSpec& spec, const PriorSet& priors, Rng& rng) {
  ChainState st;
  st.theta.variance.resize(spec.series.size());
  for (int i = 0; i < spec.m(); ++i) {
    for (auto kind : kAllComponents) {
      if (spec.series[static_cast<std::size_t>(i)].has(kind)) {
        st.theta.at(i, kind) = component_prior_centre(priors.component(kind), i);
      }
    }
  }
  st.gamma = InclusionVector::filled(spec.predictor_counts, false);
  for (int k = 0; k < spec.total_predictors(); ++k) st.gamma.set_flat(k, rng.bernoulli(priors.inclusion_flat(k)));
  st.beta = VectorXd::Zero(spec.total_predictors());
  st.sigma_eps = priors.V0 / (priors.v0 - spec.m() - 1.0);
  return st;
}

namespace {

double log_mvn(const VectorXd& x, const Eigen::LLT<MatrixXd>& llt) {
  const double quad = x.dot(llt.solve(x));
  return -0.5 * (static_cast<double>(x.size()) * std::log(2.0 * std::numbers::pi) + log_det(llt) + quad);
}

double log_inverse_gamma(double x, double shape, double scale) {
  return shape * std::log(scale) - std::lgamma(shape) - (shape + 1.0) * std::log(x) - scale / x;
}

double log_inverse_wishart(const MatrixXd& s, double df, const MatrixXd& scale) {
  const auto m = static_cast<double>(s.rows());
  const auto llt_s = robust_cholesky(s, "Sigma_eps");
  const auto llt_v = robust_cholesky(scale, "V0");
  double log_gamma_m = 0.25 * m * (m - 1.0) * std::log(std::numbers::pi);
  for (int j = 0; j < static_cast<int>(m); ++j) log_gamma_m += std::lgamma(0.5 * (df - j));
  const double trace = llt_s.solve(scale).trace();
  return 0.5 * df * log_det(llt_v) - 0.5 * df * m * std::log(2.0) - log_gamma_m -
         0.5 * (df + m + 1.0) * log_det(llt_s) - 0.5 * trace;
}

template <typename F>
auto run_step(const char* name, F&& f) {
  try {
    return f();
  } catch (const NumericError& e) {
    throw NumericError(std::string("step '") + name + "': " + e.what());
  }
}

}  // namespace

GibbsSampler::GibbsSampler(const ModelSpec& spec, const PriorSet& priors, std::vector<MatrixXd> x_blocks,
                           Eigen::Index rows, const InitialStatePrior& init)
    : spec_(spec), priors_(&priors), design_(std::move(x_blocks), rows),
      ss_(build_state_space(spec, ComponentCovariances::uniform(spec, 1.0), init)) {
  if (design_.m() != spec.m()) throw DimensionError("one predictor block per series required");
  for (int i = 0; i < spec.m(); ++i) {
    if (design_.count(i) != spec.predictor_counts[static_cast<std::size_t>(i)]) {
      throw DimensionError("predictor block " + std::to_string(i + 1) + " has the wrong column count");
    }
  }
}

MatrixXd GibbsSampler::step(const MatrixXd& y, ChainState& state, Rng& rng, SsvsStats* stats) const {
  const auto n = y.rows();
  const int d = ss_.state_dim();
  MatrixXd alpha = MatrixXd::Zero(n, d);
  StateSpaceSystem ss = ss_;

  if (d > 0) {
    ss.set_variances(state.theta);
    alpha = run_step("state path", [&] {
      return simulation_smoother(ss, state.sigma_eps, y - design_.fit(state.beta), rng).alpha;
    });
    state.theta = run_step("component variances", [&] {
      return draw_component_covariances(alpha, ss, spec_, *priors_, rng);
    });
  }

  const MatrixXd y_star = d > 0 ? MatrixXd(y - alpha * ss.Z) : y;
  const auto cond = run_step("whitening", [&] {
    return ConditionalRegression(design_, y_star, state.sigma_eps, *priors_);
  });
  state.gamma = run_step("inclusion", [&] { return draw_gamma(state.gamma, cond, rng, stats); });
  state.beta = run_step("coefficients", [&] { return cond.draw_beta(state.gamma, rng); });
  state.sigma_eps = run_step("observation covariance", [&] {
    return draw_sigma_eps(design_, y_star, state.beta, state.gamma, *priors_, rng);
  });
  return alpha;
}

double GibbsSampler::log_joint(const MatrixXd& y, const MatrixXd& alpha, const ChainState& state) const {
  const auto n = y.rows();
  const int d = ss_.state_dim();
  double total = 0.0;

  // observations
  const MatrixXd resid = y - design_.fit(state.beta) - (d > 0 ? MatrixXd(alpha * ss_.Z) : MatrixXd::Zero(n, y.cols()));
  const auto llt_eps = robust_cholesky(state.sigma_eps, "Sigma_eps");
  for (Eigen::Index t = 0; t < n; ++t) total += log_mvn(resid.row(t).transpose(), llt_eps);

  // states
  if (d > 0 && n > 0) {
    StateSpaceSystem ss = ss_;
    ss.set_variances(state.theta);
    total += log_mvn(alpha.row(0).transpose() - ss.initial_mean, robust_cholesky(ss.initial_cov, "initial state"));
    for (Eigen::Index t = 0; t + 1 < n; ++t) {
      const VectorXd r = alpha.row(t + 1).transpose() - ss.T * alpha.row(t).transpose() - ss.intercept;
      for (std::size_t s = 0; s < ss.slots.size(); ++s) {
        const double v = ss.Q(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s));
        const double x = r(ss.slots[s].state_index);
        total += -0.5 * (std::log(2.0 * std::numbers::pi * v) + x * x / v);
      }
    }
  }

  // component variance priors
  for (const auto& p : variance_parameters(spec_)) {
    const auto& prior = priors_->component(p.kind);
    total += log_inverse_gamma(*state.theta.at(p.series, p.kind), 0.5 * prior.df,
                               0.5 * prior.scale.at(static_cast<std::size_t>(p.series)));
  }

  // spike
  for (int k = 0; k < design_.total(); ++k) {
    const double pi = priors_->inclusion_flat(k);
    total += std::log(state.gamma.flat(k) ? pi : 1.0 - pi);
  }

  // slab
  const auto idx = state.gamma.active();
  if (!idx.empty()) {
    const MatrixXd raw = design_.raw_gram();
    const auto s = static_cast<Eigen::Index>(idx.size());
    MatrixXd gram(s, s);
    VectorXd diff(s);
    for (Eigen::Index a = 0; a < s; ++a) {
      diff(a) = state.beta(idx[static_cast<std::size_t>(a)]) - priors_->prior_mean(idx[static_cast<std::size_t>(a)]);
      for (Eigen::Index b = 0; b < s; ++b) gram(a, b) = raw(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
    }
    const MatrixXd prec = slab_information_from_gram(gram, priors_->kappa, priors_->omega, static_cast<int>(design_.n()));
    const auto llt = robust_cholesky(prec, "slab information matrix");
    total += -0.5 * (static_cast<double>(s) * std::log(2.0 * std::numbers::pi) - log_det(llt) + diff.dot(prec * diff));
  }

  total += log_inverse_wishart(state.sigma_eps, priors_->v0, priors_->V0);
  return total;
}

namespace {

struct ChainOutput {
  std::vector<VectorXd> beta, gamma, theta, final_state;
  std::vector<MatrixXd> sigma, paths;
  std::vector<double> log_joint;
  SsvsStats stats;
};

ChainOutput run_chain(const GibbsSampler& sampler, const MatrixXd& y, const ModelSpec& spec,
                      const PriorSet& priors, const TrainConfig& cfg, int chain) {
  Rng rng = Rng(cfg.seed).split(static_cast<std::uint64_t>(chain));
  ChainState state = cfg.warm_start ? *cfg.warm_start : initialize_chain(spec, priors, rng);
  ChainOutput out;
  const auto retained = static_cast<std::size_t>(cfg.total_draws - cfg.burn_in);
  out.beta.reserve(retained);
  for (int it = 0; it < cfg.total_draws; ++it) {
    MatrixXd alpha;
    try {
      alpha = sampler.step(y, state, rng, &out.stats);
    } catch (const NumericError& e) {
      throw NumericError("chain " + std::to_string(chain) + ", iteration " + std::to_string(it) + ", " +
                         e.what());
    }
    if (it < cfg.burn_in) continue;
    out.beta.push_back(state.beta);
    VectorXd g(state.beta.size());
    for (Eigen::Index k = 0; k < g.size(); ++k) g(k) = state.gamma.flat(static_cast<int>(k)) ? 1.0 : 0.0;
    out.gamma.push_back(std::move(g));
    out.theta.push_back(theta_to_vector(spec, state.theta));
    out.sigma.push_back(state.sigma_eps);
    out.final_state.push_back(alpha.rows() > 0 ? VectorXd(alpha.row(alpha.rows() - 1).transpose())
                                               : VectorXd::Zero(alpha.cols()));
    out.log_joint.push_back(sampler.log_joint(y, alpha, state));
    if (cfg.keep_state_paths) out.paths.push_back(std::move(alpha));
  }
  return out;
}

MatrixXd stack_rows(const std::vector<ChainOutput>& outs, std::vector<VectorXd> ChainOutput::*field,
                    Eigen::Index cols) {
  Eigen::Index rows = 0;
  for (const auto& o : outs) rows += static_cast<Eigen::Index>((o.*field).size());
  MatrixXd m(rows, cols);
  Eigen::Index r = 0;
  for (const auto& o : outs) {
    for (const auto& v : o.*field) m.row(r++) = v.transpose();
  }
  return m;
}

}  // namespace

PosteriorDraws train(const MatrixXd& y, const std::vector<MatrixXd>& x_blocks, const ModelSpec& spec,
                     const PriorSet& priors, const TrainConfig& cfg) {
  spec.validate();
  priors.validate(spec);
  cfg.validate();
  if (y.rows() < 1) throw DimensionError("training needs at least one observation");
  if (y.cols() != spec.m()) throw DimensionError("target matrix must have one column per series");
  if (!y.allFinite()) throw NumericError("targets contain NaN or infinite values");
  if (static_cast<int>(x_blocks.size()) != spec.m()) throw DimensionError("one predictor block per series required");
  for (int i = 0; i < spec.m(); ++i) {
    const auto& cfg_i = spec.series[static_cast<std::size_t>(i)];
    if (cfg_i.state_count() == 0 && spec.predictor_counts[static_cast<std::size_t>(i)] == 0) {
      throw ConfigError("series " + std::to_string(i + 1) + " has neither state components nor predictors");
    }
    if (x_blocks[static_cast<std::size_t>(i)].rows() != y.rows()) {
      throw DimensionError("predictor block " + std::to_string(i + 1) + " row count differs from the targets");
    }
  }
  if (cfg.warm_start) {
    if (cfg.warm_start->beta.size() != spec.total_predictors() || cfg.warm_start->sigma_eps.rows() != spec.m()) {
      throw DimensionError("warm start state does not match the model");
    }
  }

  const GibbsSampler sampler(spec, priors, x_blocks, y.rows(), cfg.initial_state);

  std::vector<ChainOutput> outs(static_cast<std::size_t>(cfg.chains));
  if (cfg.chains == 1) {
    outs[0] = run_chain(sampler, y, spec, priors, cfg, 0);
  } else {
    std::vector<std::future<ChainOutput>> futures;
    for (int c = 0; c < cfg.chains; ++c) {
      futures.push_back(std::async(std::launch::async, run_chain, std::cref(sampler), std::cref(y),
                                   std::cref(spec), std::cref(priors), std::cref(cfg), c));
    }
    for (int c = 0; c < cfg.chains; ++c) outs[static_cast<std::size_t>(c)] = futures[static_cast<std::size_t>(c)].get();
  }

  PosteriorDraws draws;
  draws.spec = spec;
  draws.initial_state = cfg.initial_state;
  const auto k = static_cast<Eigen::Index>(spec.total_predictors());
  draws.beta = stack_rows(outs, &ChainOutput::beta, k);
  draws.gamma = stack_rows(outs, &ChainOutput::gamma, k);
  draws.theta = stack_rows(outs, &ChainOutput::theta, static_cast<Eigen::Index>(variance_parameters(spec).size()));
  draws.final_state = stack_rows(outs, &ChainOutput::final_state, spec.state_dim());
  draws.log_joint.resize(draws.beta.rows());
  Eigen::Index r = 0;
  for (int c = 0; c < cfg.chains; ++c) {
    auto& o = outs[static_cast<std::size_t>(c)];
    for (std::size_t j = 0; j < o.sigma.size(); ++j) {
      draws.sigma_eps.push_back(std::move(o.sigma[j]));
      draws.log_joint(r++) = o.log_joint[j];
      draws.chain.push_back(c);
    }
    for (auto& p : o.paths) draws.state_paths.push_back(std::move(p));
    draws.ssvs.push_back(o.stats);
  }
  return draws;
}

}  // namespace mbsts
