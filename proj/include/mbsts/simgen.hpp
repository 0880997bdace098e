#pragma once

#include "mbsts/regression.hpp"
#include "mbsts/statespace.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mbsts {

struct SyntheticDataset {
  int model_id = 0;  // 0 for custom processes
  std::uint64_t seed = 0;
  ModelSpec spec;
  MatrixXd y;                               // n x m
  std::vector<MatrixXd> x_blocks;           // predictors used for training
  std::vector<std::vector<std::string>> predictor_names;
  VectorXd beta;                            // generating coefficients, length K
  MatrixXd sigma_eps;
  ComponentCovariances theta;
  InclusionVector gamma_true;
  MatrixXd states;                          // n x d latent path
  MatrixXd noise;                           // n x m observation errors
  // Coefficient k whose training column differs from the generating one.
  std::vector<bool> mismatched;

  Eigen::Index n() const { return y.rows(); }
};

struct SimOptions {
  // Replace every off-diagonal of Sigma_eps by rho * sqrt(s_ii s_jj).
  std::optional<double> correlation;
  // Model 7: share of each starred column (taken from the end) that is shuffled.
  double shuffle_fraction = 0.5;
};

/// Simulation Models 1-7.
SyntheticDataset generate_model(int id, int n, std::uint64_t seed, const SimOptions& options = {});

struct CustomProcess {
  ModelSpec spec;
  VectorXd beta;  // length K
  MatrixXd sigma_eps;
  ComponentCovariances theta;
  // Predictor blocks that generate y and (optionally different) blocks handed
  // to training. Standard normal predictors are drawn when both are empty.
  std::vector<MatrixXd> generating_blocks;
  std::vector<MatrixXd> training_blocks;
};

SyntheticDataset generate_custom(const CustomProcess& process, int n, std::uint64_t seed,
                                 std::optional<double> correlation = std::nullopt);

MatrixXd apply_correlation(const MatrixXd& sigma_eps, double rho);

}  // namespace mbsts
