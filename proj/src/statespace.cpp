#include "mbsts/statespace.hpp"

#include "mbsts/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace mbsts {

const char* component_name(ComponentKind kind) {
  switch (kind) {
    case ComponentKind::level: return "level";
    case ComponentKind::slope: return "slope";
    case ComponentKind::seasonal: return "seasonal";
    case ComponentKind::cycle: return "cycle";
  }
  return "?";
}

bool ComponentConfig::has(ComponentKind kind) const {
  switch (kind) {
    case ComponentKind::level: return has_trend;
    case ComponentKind::slope: return has_slope;
    case ComponentKind::seasonal: return has_seasonal();
    case ComponentKind::cycle: return has_cycle();
  }
  return false;
}

int ComponentConfig::state_count() const {
  int d = (has_trend ? 1 : 0) + (has_slope ? 1 : 0);
  if (seasonal_period) d += *seasonal_period - 1;
  if (has_cycle()) d += 2;
  return d;
}

void ComponentConfig::validate() const {
  if (has_slope && !has_trend) throw ConfigError("a slope requires a trend (level) component");
  if (has_slope && (slope_learning_rate < 0.0 || slope_learning_rate > 1.0)) {
    throw ConfigError("slope learning rate must lie in [0, 1]");
  }
  if (seasonal_period && *seasonal_period < 2) {
    throw ConfigError("seasonal period must be at least 2, got " + std::to_string(*seasonal_period));
  }
  if (cycle_frequency.has_value() != cycle_damping.has_value()) {
    throw ConfigError("cycle needs both a frequency and a damping factor");
  }
  if (cycle_frequency) {
    if (!(*cycle_frequency > 0.0 && *cycle_frequency < std::numbers::pi)) {
      throw ConfigError("cycle frequency must lie strictly inside (0, pi)");
    }
    if (!(*cycle_damping > 0.0 && *cycle_damping < 1.0)) {
      throw ConfigError("cycle damping must lie strictly inside (0, 1)");
    }
  }
}

int ModelSpec::total_predictors() const {
  int k = 0;
  for (int c : predictor_counts) k += c;
  return k;
}

int ModelSpec::predictor_offset(int series_index) const {
  int k = 0;
  for (int i = 0; i < series_index; ++i) k += predictor_counts[static_cast<std::size_t>(i)];
  return k;
}

int ModelSpec::state_dim() const {
  int d = 0;
  for (const auto& s : series) d += s.state_count();
  return d;
}

void ModelSpec::validate() const {
  if (series.empty()) throw ConfigError("model needs at least one target series");
  if (predictor_counts.size() != series.size()) {
    throw ConfigError("predictor_counts must have one entry per target series");
  }
  for (std::size_t i = 0; i < series.size(); ++i) {
    try {
      series[i].validate();
    } catch (const ConfigError& e) {
      throw ConfigError("series " + std::to_string(i + 1) + ": " + e.what());
    }
    if (predictor_counts[i] < 0) throw ConfigError("negative predictor count");
  }
}

ModelSpec ModelSpec::restrict_to(int series_index) const {
  ModelSpec out;
  out.series = {series.at(static_cast<std::size_t>(series_index))};
  out.predictor_counts = {predictor_counts.at(static_cast<std::size_t>(series_index))};
  return out;
}

ComponentCovariances ComponentCovariances::uniform(const ModelSpec& spec, double value) {
  ComponentCovariances theta;
  theta.variance.resize(spec.series.size());
  for (int i = 0; i < spec.m(); ++i) {
    for (auto kind : kAllComponents) {
      if (spec.series[static_cast<std::size_t>(i)].has(kind)) theta.at(i, kind) = value;
    }
  }
  return theta;
}

std::vector<VarianceParameter> variance_parameters(const ModelSpec& spec) {
  std::vector<VarianceParameter> out;
  for (int i = 0; i < spec.m(); ++i) {
    for (auto kind : kAllComponents) {
      if (spec.series[static_cast<std::size_t>(i)].has(kind)) out.push_back({i, kind});
    }
  }
  return out;
}

void StateSpaceSystem::set_variances(const ComponentCovariances& theta) {
  for (std::size_t s = 0; s < slots.size(); ++s) {
    const auto& slot = slots[s];
    if (static_cast<std::size_t>(slot.series) >= theta.variance.size() ||
        !theta.at(slot.series, slot.kind)) {
      throw ConfigError(std::string("missing ") + component_name(slot.kind) +
                        " variance for series " + std::to_string(slot.series + 1));
    }
    const double v = *theta.at(slot.series, slot.kind);
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ConfigError(std::string(component_name(slot.kind)) + " variance must be finite and >= 0");
    }
    Q(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)) = v;
  }
}

StateSpaceSystem build_state_space(const ModelSpec& spec, const ComponentCovariances& theta,
                                   const InitialStatePrior& init) {
  spec.validate();
  const int m = spec.m();
  const int d = spec.state_dim();

  StateSpaceSystem ss;
  ss.Z = MatrixXd::Zero(d, m);
  ss.T = MatrixXd::Zero(d, d);
  ss.intercept = VectorXd::Zero(d);
  ss.blocks.resize(static_cast<std::size_t>(m));

  int pos = 0;
  for (int i = 0; i < m; ++i) {
    const auto& cfg = spec.series[static_cast<std::size_t>(i)];
    auto& block = ss.blocks[static_cast<std::size_t>(i)];
    block.first = pos;
    if (cfg.has_trend) {
      block.level = pos++;
      ss.Z(block.level, i) = 1.0;
      ss.T(block.level, block.level) = 1.0;
      ss.slots.push_back({block.level, ComponentKind::level, i});
    }
    if (cfg.has_slope) {
      block.slope = pos++;
      ss.T(block.level, block.slope) = 1.0;
      ss.T(block.slope, block.slope) = cfg.slope_learning_rate;
      ss.intercept(block.slope) = (1.0 - cfg.slope_learning_rate) * cfg.long_term_slope;
      ss.slots.push_back({block.slope, ComponentKind::slope, i});
    }
    if (cfg.seasonal_period) {
      block.seasonal = pos;
      block.seasonal_states = *cfg.seasonal_period - 1;
      for (int k = 0; k < block.seasonal_states; ++k) {
        ss.T(pos, pos + k) = -1.0;
        if (k > 0) ss.T(pos + k, pos + k - 1) = 1.0;
      }
      ss.Z(pos, i) = 1.0;
      ss.slots.push_back({pos, ComponentKind::seasonal, i});
      pos += block.seasonal_states;
    }
    if (cfg.has_cycle()) {
      block.cycle = pos;
      const double c = *cfg.cycle_damping * std::cos(*cfg.cycle_frequency);
      const double s = *cfg.cycle_damping * std::sin(*cfg.cycle_frequency);
      ss.T(pos, pos) = c;
      ss.T(pos, pos + 1) = s;
      ss.T(pos + 1, pos) = -s;
      ss.T(pos + 1, pos + 1) = c;
      ss.Z(pos, i) = 1.0;
      ss.slots.push_back({pos, ComponentKind::cycle, i});
      ss.slots.push_back({pos + 1, ComponentKind::cycle, i});
      pos += 2;
    }
    block.size = pos - block.first;
  }

  const auto q = static_cast<Eigen::Index>(ss.slots.size());
  ss.R = MatrixXd::Zero(d, q);
  for (Eigen::Index s = 0; s < q; ++s) ss.R(ss.slots[static_cast<std::size_t>(s)].state_index, s) = 1.0;
  ss.Q = MatrixXd::Zero(q, q);
  if (theta.variance.size() != spec.series.size()) {
    throw ConfigError("component covariances must list every target series");
  }
  ss.set_variances(theta);

  ss.initial_mean = VectorXd::Constant(d, init.mean);
  ss.initial_cov = init.variance * MatrixXd::Identity(d, d);
  return ss;
}

VectorXd propagate(const StateSpaceSystem& ss, const VectorXd& state, const VectorXd& disturbance) {
  if (state.size() != ss.T.rows() || disturbance.size() != ss.R.cols()) {
    throw DimensionError("propagate: dimension mismatch");
  }
  return ss.T * state + ss.intercept + ss.R * disturbance;
}

VectorXd observe(const StateSpaceSystem& ss, const VectorXd& state, const VectorXd& regression) {
  if (state.size() != ss.Z.rows() || regression.size() != ss.Z.cols()) {
    throw DimensionError("observe: dimension mismatch");
  }
  return ss.Z.transpose() * state + regression;
}

}  // namespace mbsts
