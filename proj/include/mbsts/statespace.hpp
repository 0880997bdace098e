#pragma once

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <vector>

namespace mbsts {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class ComponentKind : int { level = 0, slope = 1, seasonal = 2, cycle = 3 };
inline constexpr std::array<ComponentKind, 4> kAllComponents{
    ComponentKind::level, ComponentKind::slope, ComponentKind::seasonal, ComponentKind::cycle};
const char* component_name(ComponentKind kind);

/// Structural components of one target series. The slope follows
/// delta' = D + rho (delta - D) + v; rho = 1 gives a random-walk slope.
struct ComponentConfig {
  bool has_trend = false;
  bool has_slope = false;
  double slope_learning_rate = 1.0;
  double long_term_slope = 0.0;
  std::optional<int> seasonal_period;
  std::optional<double> cycle_frequency;
  std::optional<double> cycle_damping;

  bool has_seasonal() const { return seasonal_period.has_value(); }
  bool has_cycle() const { return cycle_frequency.has_value(); }
  bool has(ComponentKind kind) const;
  int state_count() const;
  void validate() const;
};

struct ModelSpec {
  std::vector<ComponentConfig> series;
  std::vector<int> predictor_counts;

  int m() const { return static_cast<int>(series.size()); }
  int total_predictors() const;
  int predictor_offset(int series_index) const;
  int state_dim() const;
  void validate() const;

  /// One-series spec (used by the independent per-series model).
  ModelSpec restrict_to(int series_index) const;
};

/// Diagonal component variances; std::nullopt where the series lacks the
/// component.
struct ComponentCovariances {
  std::vector<std::array<std::optional<double>, 4>> variance;

  std::optional<double>& at(int series, ComponentKind kind) {
    return variance[static_cast<std::size_t>(series)][static_cast<std::size_t>(kind)];
  }
  const std::optional<double>& at(int series, ComponentKind kind) const {
    return variance[static_cast<std::size_t>(series)][static_cast<std::size_t>(kind)];
  }

  static ComponentCovariances uniform(const ModelSpec& spec, double value);
};

/// (series, component) pairs that carry a variance parameter, series-major.
struct VarianceParameter {
  int series;
  ComponentKind kind;
};
std::vector<VarianceParameter> variance_parameters(const ModelSpec& spec);

struct DisturbanceSlot {
  int state_index;
  ComponentKind kind;
  int series;
};

/// State indices of one series' block; -1 where absent.
struct SeriesBlock {
  int first = 0;
  int level = -1;
  int slope = -1;
  int seasonal = -1;
  int seasonal_states = 0;
  int cycle = -1;
  int size = 0;
};

struct InitialStatePrior {
  double mean = 0.0;
  double variance = 1e6;
};

/// alpha_{t+1} = T alpha_t + c + R eta_t,  eta_t ~ N(0, Q)
/// y_t = Z^T alpha_t + xi_t + eps_t
/// The initial distribution N(mu0, Sigma0) applies to the state at the first
/// observation.
struct StateSpaceSystem {
  MatrixXd Z;          // d x m
  MatrixXd T;          // d x d
  MatrixXd R;          // d x q
  MatrixXd Q;          // q x q
  VectorXd intercept;  // d
  VectorXd initial_mean;
  MatrixXd initial_cov;
  std::vector<DisturbanceSlot> slots;
  std::vector<SeriesBlock> blocks;

  int state_dim() const { return static_cast<int>(T.rows()); }
  int disturbance_dim() const { return static_cast<int>(R.cols()); }
  int series_count() const { return static_cast<int>(Z.cols()); }

  /// Replace Q from component variances.
  void set_variances(const ComponentCovariances& theta);
};

StateSpaceSystem build_state_space(const ModelSpec& spec, const ComponentCovariances& theta,
                                   const InitialStatePrior& init = {});

VectorXd propagate(const StateSpaceSystem& ss, const VectorXd& state, const VectorXd& disturbance);
VectorXd observe(const StateSpaceSystem& ss, const VectorXd& state, const VectorXd& regression);

}  // namespace mbsts
