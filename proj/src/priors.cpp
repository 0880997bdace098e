#include "mbsts/priors.hpp"

#include "mbsts/error.hpp"
#include "mbsts/linalg.hpp"

namespace mbsts {

void PriorConfig::validate() const {
  if (!(expected_r2 > 0.0 && expected_r2 < 1.0)) throw ConfigError("expected_r2 must lie in (0, 1)");
  if (!(v0_excess > 0.0)) throw ConfigError("v0_excess must be positive");
  if (!(kappa > 0.0)) throw ConfigError("kappa must be positive");
  if (!(omega > 0.0 && omega <= 1.0)) throw ConfigError("omega must lie in (0, 1]");
  if (!(component_sigma_fraction > 0.0) || !(component_sample_size > 0.0)) {
    throw ConfigError("component prior settings must be positive");
  }
}

MatrixXd target_covariance(const MatrixXd& y) {
  const auto m = y.cols();
  if (y.rows() < 2) return MatrixXd::Identity(m, m);
  const MatrixXd centred = y.rowwise() - y.colwise().mean();
  MatrixXd cov = centred.transpose() * centred / static_cast<double>(y.rows() - 1);
  symmetrize(cov);
  if (is_positive_definite(cov)) return cov;
  MatrixXd diag = MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) diag(i, i) = cov(i, i) > 0.0 ? cov(i, i) : 1.0;
  return diag;
}

PriorSet make_priors(const ModelSpec& spec, const MatrixXd& y, const PriorConfig& cfg) {
  cfg.validate();
  const int m = spec.m();
  std::vector<double> sizes = cfg.expected_model_size;
  if (sizes.empty()) {
    for (int k : spec.predictor_counts) sizes.push_back(0.5 * k);
  }
  if (static_cast<int>(sizes.size()) != m) throw ConfigError("expected_model_size needs one entry per series");
  PriorSet p = elicit_priors(spec.predictor_counts, sizes, cfg.expected_r2, m + 1.0 + cfg.v0_excess,
                             target_covariance(y), cfg.kappa, cfg.omega);
  set_default_component_priors(p, spec, y, cfg.component_sigma_fraction, cfg.component_sample_size);
  return p;
}

}  // namespace mbsts
