#pragma once

#include "mbsts/regression.hpp"
#include "mbsts/statespace.hpp"

#include <vector>

namespace mbsts {

/// User-facing prior knobs; the PriorSet is elicited from these and the
/// training targets.
struct PriorConfig {
  std::vector<double> expected_model_size;  // per series; empty means k_i / 2
  double expected_r2 = 0.5;
  double v0_excess = 0.01;  // v0 = m + 1 + v0_excess; the sample covariance of a trending series is huge, so keep its weight small
  double kappa = 0.01;  // slab weight in observations; A is not scaled by Sigma_eps
  double omega = 0.5;
  double component_sigma_fraction = 0.01;
  double component_sample_size = 0.01;

  void validate() const;
};

/// Sample covariance of the columns of y; falls back to the diagonal (and to
/// unit variances) when the sample matrix is not positive definite.
MatrixXd target_covariance(const MatrixXd& y);

PriorSet make_priors(const ModelSpec& spec, const MatrixXd& y, const PriorConfig& cfg);

}  // namespace mbsts
