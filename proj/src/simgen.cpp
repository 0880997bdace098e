#include "mbsts/simgen.hpp"

#include "mbsts/error.hpp"
#include "mbsts/linalg.hpp"
#include "mbsts/random.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace mbsts {
namespace {

enum Stream : std::uint64_t { predictors = 1, shuffles = 2, states = 3, noise = 4 };

ComponentConfig trend(bool slope, double rho = 1.0, double d = 0.0) {
  ComponentConfig c;
  c.has_trend = true;
  c.has_slope = slope;
  c.slope_learning_rate = rho;
  c.long_term_slope = d;
  return c;
}

void set(ComponentCovariances& theta, int series, ComponentKind kind, double sd) {
  theta.at(series, kind) = sd * sd;
}

MatrixXd base_predictors(int n, Rng& rng) {
  MatrixXd x(n, 4);
  for (int t = 0; t < n; ++t) {
    x(t, 0) = 5.0 + 5.0 * rng.normal();
    x(t, 1) = rng.poisson(10.0);
    x(t, 2) = rng.bernoulli(0.5) ? 1.0 : 0.0;
    x(t, 3) = -2.0 + 5.0 * rng.normal();
  }
  return x;
}

VectorXd shuffled_tail(const VectorXd& col, double fraction, Rng& rng) {
  VectorXd out = col;
  const auto n = out.size();
  const auto count = static_cast<Eigen::Index>(std::ceil(fraction * static_cast<double>(n)));
  if (count > 1) rng.shuffle(std::span<double>(out.data() + (n - count), static_cast<std::size_t>(count)));
  return out;
}

MatrixXd sigma_pair() {
  MatrixXd s(2, 2);
  s << 1.1, 0.7, 0.7, 0.9;
  return s;
}

// Model 2 trend for the first two series; Models 3, 4 and 7 add to it.
void model2_states(ModelSpec& spec, ComponentCovariances& theta) {
  spec.series = {trend(true, 0.6, 0.02), trend(true, 1.0, 0.0)};
  theta.variance.assign(2, {});
  set(theta, 0, ComponentKind::level, 0.5);
  set(theta, 1, ComponentKind::level, 1.0);
  set(theta, 0, ComponentKind::slope, 0.08);
  set(theta, 1, ComponentKind::slope, 0.16);
}

void add_season_and_cycle(ModelSpec& spec, ComponentCovariances& theta, bool cycle) {
  spec.series[0].seasonal_period = 4;
  set(theta, 0, ComponentKind::seasonal, 0.01);
  if (cycle) {
    spec.series[1].cycle_frequency = std::numbers::pi / 10.0;
    spec.series[1].cycle_damping = 0.5;
    set(theta, 1, ComponentKind::cycle, 0.01);
  }
}

}  // namespace

MatrixXd apply_correlation(const MatrixXd& sigma_eps, double rho) {
  MatrixXd out = sigma_eps;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
      if (i != j) out(i, j) = rho * std::sqrt(sigma_eps(i, i) * sigma_eps(j, j));
    }
  }
  if (!is_positive_definite(out)) {
    throw ConfigError("correlation " + std::to_string(rho) + " makes Sigma_eps indefinite");
  }
  return out;
}

SyntheticDataset generate_custom(const CustomProcess& process, int n, std::uint64_t seed,
                                 std::optional<double> correlation) {
  const auto& spec = process.spec;
  spec.validate();
  if (n < 2) throw ConfigError("simulated series need n >= 2");
  const int m = spec.m();
  const int k = spec.total_predictors();
  if (process.beta.size() != k) throw DimensionError("generating coefficients must have length K");
  MatrixXd sigma = process.sigma_eps;
  if (sigma.rows() != m || sigma.cols() != m) throw DimensionError("Sigma_eps must be m x m");
  if (correlation) sigma = apply_correlation(sigma, *correlation);
  if (!is_positive_definite(sigma)) throw ConfigError("Sigma_eps is not positive definite");

  const Rng master(seed);
  SyntheticDataset ds;
  ds.seed = seed;
  ds.spec = spec;
  ds.beta = process.beta;
  ds.sigma_eps = sigma;
  ds.theta = process.theta;

  std::vector<MatrixXd> gen = process.generating_blocks;
  if (gen.empty()) {
    Rng rng = master.split(Stream::predictors);
    for (int i = 0; i < m; ++i) {
      MatrixXd x(n, spec.predictor_counts[static_cast<std::size_t>(i)]);
      for (Eigen::Index c = 0; c < x.cols(); ++c) {
        for (int t = 0; t < n; ++t) x(t, c) = rng.normal();
      }
      gen.push_back(std::move(x));
    }
  }
  ds.x_blocks = process.training_blocks.empty() ? gen : process.training_blocks;
  if (static_cast<int>(gen.size()) != m || static_cast<int>(ds.x_blocks.size()) != m) {
    throw DimensionError("one predictor block per series required");
  }
  for (int i = 0; i < m; ++i) {
    const auto ki = spec.predictor_counts[static_cast<std::size_t>(i)];
    for (const auto* blocks : {&gen, &ds.x_blocks}) {
      const auto& x = (*blocks)[static_cast<std::size_t>(i)];
      if (x.rows() < n || x.cols() != ki) throw DimensionError("predictor block has the wrong shape");
    }
    gen[static_cast<std::size_t>(i)] = gen[static_cast<std::size_t>(i)].topRows(n).eval();
    ds.x_blocks[static_cast<std::size_t>(i)] = ds.x_blocks[static_cast<std::size_t>(i)].topRows(n).eval();
  }

  ds.mismatched.assign(static_cast<std::size_t>(k), false);
  for (int i = 0, off = 0; i < m; ++i) {
    const auto& g = gen[static_cast<std::size_t>(i)];
    const auto& x = ds.x_blocks[static_cast<std::size_t>(i)];
    for (Eigen::Index c = 0; c < g.cols(); ++c, ++off) ds.mismatched[static_cast<std::size_t>(off)] = g.col(c) != x.col(c);
  }

  ds.gamma_true = InclusionVector::filled(spec.predictor_counts, false);
  for (int j = 0; j < k; ++j) ds.gamma_true.set_flat(j, process.beta(j) != 0.0);

  const StateSpaceSystem ss = build_state_space(spec, process.theta);
  const int d = ss.state_dim();
  const auto q = static_cast<Eigen::Index>(ss.disturbance_dim());
  const VectorXd sd = ss.Q.diagonal().cwiseSqrt();
  ds.states = MatrixXd(n, d);
  {
    Rng rng = master.split(Stream::states);
    VectorXd a = rng.normal_vector(d);
    for (int t = 0; t < n; ++t) {
      ds.states.row(t) = a.transpose();
      VectorXd eta(q);
      for (Eigen::Index s = 0; s < q; ++s) eta(s) = sd(s) * rng.normal();
      a = propagate(ss, a, eta);
    }
  }

  const RegressionDesign design(gen, n);
  const MatrixXd fit = design.fit(process.beta);
  const MatrixXd chol = Eigen::LLT<MatrixXd>(sigma).matrixL();
  ds.noise = MatrixXd(n, m);
  {
    Rng rng = master.split(Stream::noise);
    for (int t = 0; t < n; ++t) ds.noise.row(t) = (chol * rng.normal_vector(m)).transpose();
  }
  ds.y = (d > 0 ? MatrixXd(ds.states * ss.Z) : MatrixXd::Zero(n, m)) + fit + ds.noise;

  ds.predictor_names.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < spec.predictor_counts[static_cast<std::size_t>(i)]; ++j) {
      ds.predictor_names[static_cast<std::size_t>(i)].push_back("x" + std::to_string(j + 1));
    }
  }
  return ds;
}

SyntheticDataset generate_model(int id, int n, std::uint64_t seed, const SimOptions& options) {
  if (id < 1 || id > 7) throw ConfigError("unknown simulation model " + std::to_string(id));
  if (n < 2) throw ConfigError("simulated series need n >= 2");
  const Rng master(seed);
  CustomProcess p;
  Rng xrng = master.split(Stream::predictors);
  const MatrixXd x = base_predictors(n, xrng);

  if (id <= 4) {
    if (id == 1) {
      p.spec.series = {trend(true, 1.0, 0.0), trend(false)};
      p.theta.variance.assign(2, {});
      set(p.theta, 0, ComponentKind::level, 0.5);
      set(p.theta, 1, ComponentKind::level, 1.0);
      set(p.theta, 0, ComponentKind::slope, 0.08);
    } else {
      model2_states(p.spec, p.theta);
      if (id >= 3) add_season_and_cycle(p.spec, p.theta, id == 4);
    }
    p.spec.predictor_counts = {4, 4};
    p.beta.resize(8);
    p.beta << 2, -1, -0.5, 0, -1.5, 4, 0, 2.5;
    p.sigma_eps = sigma_pair();
    p.generating_blocks = {x, x};
  } else if (id == 5 || id == 6) {
    model2_states(p.spec, p.theta);
    p.spec.series.push_back(trend(true, 0.3, 0.01));
    p.theta.variance.emplace_back();
    set(p.theta, 2, ComponentKind::level, 0.7);
    set(p.theta, 2, ComponentKind::slope, 0.12);
    if (id == 6) {
      p.spec.series.push_back(trend(true, 0.5, 0.0));
      p.theta.variance.emplace_back();
      set(p.theta, 3, ComponentKind::level, 0.6);
      set(p.theta, 3, ComponentKind::slope, 0.10);
    }
    const int m = p.spec.m();
    p.spec.predictor_counts.assign(static_cast<std::size_t>(m), 4);
    p.beta.resize(4 * m);
    p.beta.head(12) << 2, -1, -0.5, 0, -1.5, 4, 0, 2.5, 3, 0, 3.5, -2;
    if (id == 6) p.beta.tail(4) << 0, 1, 1.5, -0.5;
    p.sigma_eps = MatrixXd::Constant(m, m, 0.7);
    const double diag[] = {1.1, 0.9, 1.0, 1.2};
    for (int i = 0; i < m; ++i) p.sigma_eps(i, i) = diag[i];
    p.generating_blocks.assign(static_cast<std::size_t>(m), x);
  } else {
    model2_states(p.spec, p.theta);
    add_season_and_cycle(p.spec, p.theta, true);
    p.spec.predictor_counts = {8, 8};
    p.beta.resize(16);
    p.beta << 2, -1, -0.5, 0, 1.5, -2, 0, 3.5, -1.5, 4, 0, 2.5, -1, 0, -3, 0.5;
    p.sigma_eps = sigma_pair();

    MatrixXd full(n, 8);
    full.leftCols(4) = x;
    for (int t = 0; t < n; ++t) {
      full(t, 4) = -5.0 + 5.0 * xrng.normal();
      full(t, 5) = xrng.poisson(15.0);
      full(t, 6) = xrng.poisson(20.0);
      full(t, 7) = 10.0 * xrng.normal();
    }
    if (!(options.shuffle_fraction >= 0.0 && options.shuffle_fraction <= 1.0)) {
      throw ConfigError("shuffle fraction must lie in [0, 1]");
    }
    Rng srng = master.split(Stream::shuffles);
    const VectorXd x2s = shuffled_tail(full.col(1), options.shuffle_fraction, srng);
    const VectorXd x5s = shuffled_tail(full.col(4), options.shuffle_fraction, srng);
    const VectorXd x8s = shuffled_tail(full.col(7), options.shuffle_fraction, srng);

    MatrixXd gen1 = full;
    gen1.col(7) = x8s;
    MatrixXd gen2 = full;
    gen2.col(1) = x2s;
    MatrixXd training = full;
    training.col(1) = x2s;
    training.col(4) = x5s;
    training.col(7) = x8s;
    p.generating_blocks = {gen1, gen2};
    p.training_blocks = {training, training};
  }

  auto ds = generate_custom(p, n, seed, options.correlation);
  ds.model_id = id;
  if (id == 7) {
    for (auto& names : ds.predictor_names) {
      names[1] = "x2s";
      names[4] = "x5s";
      names[7] = "x8s";
    }
  }
  return ds;
}

}  // namespace mbsts
