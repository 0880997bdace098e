#include "mbsts/forecast.hpp"

#include "mbsts/error.hpp"
#include "mbsts/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mbsts {

ForecastResult predict(const PosteriorDraws& draws, const ModelSpec& spec,
                       const std::vector<MatrixXd>& x_future, int horizon, Rng& rng) {
  if (horizon < 0) throw ConfigError("horizon must be non-negative");
  ForecastResult out;
  const int m = spec.m();
  out.mean = MatrixXd::Zero(horizon, m);
  if (horizon == 0) return out;
  if (draws.size() == 0) throw ConfigError("no posterior draws to forecast from");
  if (static_cast<int>(x_future.size()) != m) throw DimensionError("future predictors needed for every series");
  for (int i = 0; i < m; ++i) {
    const auto& x = x_future[static_cast<std::size_t>(i)];
    if (x.cols() != spec.predictor_counts[static_cast<std::size_t>(i)]) {
      throw DimensionError("future predictors for series " + std::to_string(i + 1) + " have the wrong width");
    }
    if (x.rows() < horizon) {
      throw DimensionError("future predictors for series " + std::to_string(i + 1) + " cover " +
                           std::to_string(x.rows()) + " of " + std::to_string(horizon) + " steps");
    }
  }

  const RegressionDesign design(x_future, -1);
  StateSpaceSystem ss = build_state_space(spec, draws.theta_at(0), draws.initial_state);
  const int d = ss.state_dim();
  const auto q = static_cast<Eigen::Index>(ss.disturbance_dim());
  // Per-draw streams keyed off one value from the caller's stream so that
  // paths do not depend on the order they are generated in.
  const auto base = rng.engine()();

  out.samples.reserve(static_cast<std::size_t>(draws.size()));
  for (int r = 0; r < draws.size(); ++r) {
    Rng path_rng(derive_seed(base, static_cast<std::uint64_t>(r)));
    if (d > 0) ss.set_variances(draws.theta_at(r));
    const VectorXd sd = ss.Q.diagonal().cwiseSqrt();
    const MatrixXd chol_eps = psd_square_root(draws.sigma_eps[static_cast<std::size_t>(r)]);
    const MatrixXd fit = design.fit(draws.beta.row(r).transpose()).topRows(horizon);

    MatrixXd path(horizon, m);
    VectorXd state = draws.final_state.row(r).transpose();
    for (int h = 0; h < horizon; ++h) {
      if (d > 0) {
        VectorXd eta(q);
        for (Eigen::Index s = 0; s < q; ++s) eta(s) = sd(s) * path_rng.normal();
        state = propagate(ss, state, eta);
      }
      const VectorXd eps = chol_eps * path_rng.normal_vector(m);
      path.row(h) = (observe(ss, state, fit.row(h).transpose()) + eps).transpose();
    }
    out.samples.push_back(std::move(path));
  }
  return summarize(std::move(out), {});
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw ConfigError("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("quantile probability must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

ForecastResult summarize(ForecastResult result, const std::vector<double>& levels) {
  if (result.samples.empty()) throw ConfigError("cannot summarize an empty forecast");
  const auto h = result.samples.front().rows();
  const auto m = result.samples.front().cols();
  result.mean = MatrixXd::Zero(h, m);
  for (const auto& s : result.samples) {
    if (s.rows() != h || s.cols() != m) throw DimensionError("forecast samples differ in shape");
    result.mean += s;
  }
  result.mean /= static_cast<double>(result.samples.size());

  std::vector<double> probs;
  for (double level : levels) {
    if (!(level > 0.0 && level <= 1.0)) throw ConfigError("band level must lie in (0, 1]");
    probs.push_back(0.5 * (1.0 - level));
    probs.push_back(0.5 * (1.0 + level));
  }
  std::vector<double> cell(result.samples.size());
  for (double p : probs) {
    if (result.quantiles.count(p)) continue;
    MatrixXd qm(h, m);
    for (Eigen::Index t = 0; t < h; ++t) {
      for (Eigen::Index i = 0; i < m; ++i) {
        for (std::size_t r = 0; r < result.samples.size(); ++r) cell[r] = result.samples[r](t, i);
        qm(t, i) = quantile(cell, p);
      }
    }
    result.quantiles.emplace(p, std::move(qm));
  }
  return result;
}

double one_step_error(const VectorXd& y_true, const VectorXd& forecast_mean) {
  if (y_true.size() != forecast_mean.size()) throw DimensionError("one_step_error: length mismatch");
  return (y_true - forecast_mean).cwiseAbs().sum();
}

}  // namespace mbsts
