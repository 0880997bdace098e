#pragma once

#include "mbsts/kalman.hpp"
#include "mbsts/random.hpp"
#include "mbsts/regression.hpp"
#include "mbsts/statespace.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace mbsts {

/// Full parameter state of one chain.
struct ChainState {
  ComponentCovariances theta;
  InclusionVector gamma;
  VectorXd beta;
  MatrixXd sigma_eps;
};

struct TrainConfig {
  int total_draws = 2000;
  int burn_in = 200;
  std::uint64_t seed = 0;
  int chains = 1;
  bool keep_state_paths = true;
  InitialStatePrior initial_state;
  // Start every chain here instead of initialize_chain (used by warm refits).
  std::optional<ChainState> warm_start;

  void validate() const;
};

/// Retained draws from all chains, concatenated chain by chain.
struct PosteriorDraws {
  ModelSpec spec;
  InitialStatePrior initial_state;
  MatrixXd beta;                   // draws x K
  MatrixXd gamma;                  // draws x K, entries 0/1
  std::vector<MatrixXd> sigma_eps; // m x m each
  MatrixXd theta;                  // draws x P, columns follow variance_parameters(spec)
  MatrixXd final_state;            // draws x d, state at the last observation
  std::vector<MatrixXd> state_paths;  // n x d each; empty unless kept
  VectorXd log_joint;              // log joint density at each retained draw
  std::vector<int> chain;
  std::vector<SsvsStats> ssvs;     // one per chain

  int size() const { return static_cast<int>(beta.rows()); }
  ComponentCovariances theta_at(int draw) const;
  InclusionVector gamma_at(int draw) const;
  ChainState state_at(int draw) const;

  /// Column means of gamma.
  VectorXd inclusion_frequencies() const;
};

ComponentCovariances theta_from_vector(const ModelSpec& spec, const VectorXd& values);
VectorXd theta_to_vector(const ModelSpec& spec, const ComponentCovariances& theta);

/// Variances from the univariate inverse-gamma conditionals given a state
/// path (rows are time). Residuals are alpha_{t+1} - T alpha_t - c on the
/// stochastic states; the two cycle states share one variance.
ComponentCovariances draw_component_covariances(const MatrixXd& alpha, const StateSpaceSystem& ss,
                                                const ModelSpec& spec, const PriorSet& priors,
                                                Rng& rng);

/// Prior centre of a component variance: W / (w - 2) when that mean exists,
/// otherwise W / w.
double component_prior_centre(const ComponentPrior& prior, int series);

ChainState initialize_chain(const ModelSpec& spec, const PriorSet& priors, Rng& rng);

/// One five-step Gibbs cycle on fixed data.
class GibbsSampler {
 public:
  GibbsSampler(const ModelSpec& spec, const PriorSet& priors, std::vector<MatrixXd> x_blocks,
               Eigen::Index rows, const InitialStatePrior& init = {});

  /// Updates `state` in place and returns the drawn state path (n x d).
  MatrixXd step(const MatrixXd& y, ChainState& state, Rng& rng, SsvsStats* stats = nullptr) const;

  double log_joint(const MatrixXd& y, const MatrixXd& alpha, const ChainState& state) const;

  const RegressionDesign& design() const { return design_; }
  const StateSpaceSystem& system() const { return ss_; }

 private:
  ModelSpec spec_;
  const PriorSet* priors_;
  RegressionDesign design_;
  StateSpaceSystem ss_;
};

PosteriorDraws train(const MatrixXd& y, const std::vector<MatrixXd>& x_blocks, const ModelSpec& spec,
                     const PriorSet& priors, const TrainConfig& cfg);

}  // namespace mbsts
