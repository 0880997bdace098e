#pragma once

#include "mbsts/random.hpp"
#include "mbsts/statespace.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <vector>

namespace mbsts {

/// gamma_ij = 1 iff coefficient j of series i is free.
struct InclusionVector {
  std::vector<std::vector<std::uint8_t>> bits;

  static InclusionVector filled(const std::vector<int>& counts, bool value);

  int total() const;
  int count_included() const;
  bool flat(int k) const;
  void set_flat(int k, bool value);
  std::vector<int> active() const;  // flat indices of included predictors
  std::vector<int> counts() const;

  bool operator==(const InclusionVector&) const = default;
};

/// Inverse-gamma prior IG(df/2, scale_i/2) on the variance of one
/// component for each series (the 1x1 inverse Wishart IW(df, scale_i)).
struct ComponentPrior {
  double df = 0.01;
  std::vector<double> scale;
};

struct PriorSet {
  std::vector<VectorXd> inclusion_prob;  // pi_i, one vector per series
  VectorXd prior_mean;                   // b, length K
  double kappa = 1.0;                    // prior weight in observations
  double omega = 0.5;                    // diagonal shrinkage of the fallback slab
  double v0 = 0.0;
  MatrixXd V0;
  std::array<ComponentPrior, 4> components;  // indexed by ComponentKind

  const ComponentPrior& component(ComponentKind kind) const {
    return components[static_cast<std::size_t>(kind)];
  }
  ComponentPrior& component(ComponentKind kind) { return components[static_cast<std::size_t>(kind)]; }

  double inclusion_flat(int k) const;
  void validate(const ModelSpec& spec) const;
};

/// pi_ij = q_i / k_i, V0 = (v0 - m - 1)(1 - R^2) Sigma_y, b = 0.
PriorSet elicit_priors(const std::vector<int>& predictor_counts,
                       const std::vector<double>& expected_model_sizes, double expected_r2,
                       double v0, const MatrixXd& sigma_y, double kappa = 1.0, double omega = 0.5);

/// Weak component-variance priors centred on (sigma_fraction * sd(y_i))^2
/// with `sample_size` observations of weight.
void set_default_component_priors(PriorSet& priors, const ModelSpec& spec, const MatrixXd& y,
                                  double sigma_fraction = 0.01, double sample_size = 0.01);

struct RegressionData {
  MatrixXd y_star;                // n x m
  std::vector<MatrixXd> x_blocks; // X_i, n x k_i
};

/// A_gamma = kappa X^T X / n when X^T X is positive definite, otherwise
/// kappa (omega X^T X + (1 - omega) diag(X^T X)) / n.
MatrixXd slab_information_matrix(const MatrixXd& x_gamma, double kappa, double omega, int n);
MatrixXd slab_information_from_gram(const MatrixXd& gram, double kappa, double omega, int n);

struct WhitenedSystem {
  VectorXd y;  // nm
  MatrixXd x;  // nm x K
};

/// Applies ((U^{-1})^T kron I_n) with Sigma_eps = U^T U blockwise to vec(Y*)
/// and the block-diagonal predictor matrix.
WhitenedSystem whiten(const RegressionData& data, const MatrixXd& sigma_eps);

/// Immutable predictor blocks with precomputed cross products.
class RegressionDesign {
 public:
  RegressionDesign() = default;
  explicit RegressionDesign(std::vector<MatrixXd> x_blocks, Eigen::Index rows = -1);

  Eigen::Index n() const { return n_; }
  int m() const { return static_cast<int>(blocks_.size()); }
  int total() const { return static_cast<int>(stacked_.cols()); }
  int offset(int series) const { return offsets_[static_cast<std::size_t>(series)]; }
  int count(int series) const { return counts_[static_cast<std::size_t>(series)]; }
  const std::vector<int>& counts() const { return counts_; }
  const std::vector<MatrixXd>& blocks() const { return blocks_; }

  /// [X_1 ... X_m], n x K.
  const MatrixXd& stacked() const { return stacked_; }
  /// X_j^T X_k for all pairs, K x K.
  const MatrixXd& cross_gram() const { return cross_; }
  /// X^T X of the block-diagonal stacked matrix.
  MatrixXd raw_gram() const;

  /// Regression contribution X_i beta_i per series, n x m.
  MatrixXd fit(const VectorXd& beta) const;
  int series_of(int flat) const;

 private:
  std::vector<MatrixXd> blocks_;
  std::vector<int> counts_;
  std::vector<int> offsets_;
  MatrixXd stacked_;
  MatrixXd cross_;
  Eigen::Index n_ = 0;
};

struct BetaPosterior {
  std::vector<int> active;
  VectorXd mean;       // on active coordinates
  MatrixXd precision;  // X^T X (whitened) + A
};

/// Conditional regression given Sigma_eps and Y*: whitened sufficient
/// statistics shared by the inclusion scores and coefficient draws.
class ConditionalRegression {
 public:
  ConditionalRegression(const RegressionDesign& design, const MatrixXd& y_star,
                        const MatrixXd& sigma_eps, const PriorSet& priors);

  /// Log of the unnormalised conditional p(gamma | Sigma_eps, Y*).
  double log_score(const InclusionVector& gamma) const;
  BetaPosterior posterior(const InclusionVector& gamma) const;
  VectorXd draw_beta(const InclusionVector& gamma, Rng& rng) const;

  const MatrixXd& whitened_gram() const { return xtx_; }
  const VectorXd& whitened_cross() const { return xty_; }
  const RegressionDesign& design() const { return *design_; }
  const PriorSet& priors() const { return *priors_; }

 private:
  MatrixXd slab(const std::vector<int>& idx) const;

  const RegressionDesign* design_;
  const PriorSet* priors_;
  MatrixXd xtx_;
  VectorXd xty_;
  MatrixXd raw_gram_;
};

double gamma_log_score(const InclusionVector& gamma, const MatrixXd& sigma_eps,
                       const RegressionData& data, const PriorSet& priors);

VectorXd draw_beta(const ConditionalRegression& cond, const InclusionVector& gamma, Rng& rng);

struct SsvsStats {
  long proposals = 0;
  long flips = 0;
};

/// One SSVS sweep over all (i, j) in a freshly shuffled order. Coordinates with
/// pi in {0, 1} are pinned without scoring.
InclusionVector draw_gamma(const InclusionVector& current, const ConditionalRegression& cond,
                           Rng& rng, SsvsStats* stats = nullptr);

/// Sigma_eps ~ IW(v0 + n, E^T E + V0), E = Y* - X* B_gamma.
MatrixXd draw_sigma_eps(const RegressionDesign& design, const MatrixXd& y_star,
                        const VectorXd& beta, const InclusionVector& gamma, const PriorSet& priors,
                        Rng& rng);

}  // namespace mbsts
