#pragma once

#include "mbsts/random.hpp"
#include "mbsts/statespace.hpp"

#include <vector>

namespace mbsts {

/// Output of the forward recursion. Index t refers to observation row t.
/// predicted_*[t] is the state distribution at t given rows < t;
/// filtered_*[t] is the distribution given rows <= t.
struct FilterResult {
  std::vector<VectorXd> predicted_means;
  std::vector<MatrixXd> predicted_covs;
  std::vector<VectorXd> filtered_means;
  std::vector<MatrixXd> filtered_covs;
  double log_likelihood = 0.0;

  // Quantities reused by the backward pass.
  std::vector<VectorXd> innovations;
  std::vector<MatrixXd> innovation_precisions;  // F_t^{-1}
  std::vector<MatrixXd> filter_gains;           // P_t Z F_t^{-1}

  std::size_t size() const { return predicted_means.size(); }
};

struct SmoothedState {
  VectorXd mean;
  MatrixXd cov;
};

struct StatePathDraw {
  MatrixXd alpha;  // n x d, row t is the state at observation t

  Eigen::Index size() const { return alpha.rows(); }
};

/// Forward Gaussian recursion for y (n x m) whose regression contribution has
/// already been removed. `obs_cov` is Sigma_eps.
FilterResult kalman_filter(const StateSpaceSystem& ss, const MatrixXd& obs_cov, const MatrixXd& y);

/// Fixed-interval smoother (backward r/N recursion; no inversion of P).
std::vector<SmoothedState> kalman_smoother(const FilterResult& fr, const StateSpaceSystem& ss);

/// Draw alpha | y by the mean-correction simulation smoother.
StatePathDraw simulation_smoother(const StateSpaceSystem& ss, const MatrixXd& obs_cov,
                                  const MatrixXd& y, Rng& rng);

}  // namespace mbsts
