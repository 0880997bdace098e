#include "mbsts/regression.hpp"

#include "mbsts/error.hpp"
#include "mbsts/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace mbsts {

InclusionVector InclusionVector::filled(const std::vector<int>& counts, bool value) {
  InclusionVector g;
  for (int c : counts) g.bits.emplace_back(static_cast<std::size_t>(c), value ? 1 : 0);
  return g;
}

int InclusionVector::total() const {
  int k = 0;
  for (const auto& b : bits) k += static_cast<int>(b.size());
  return k;
}

int InclusionVector::count_included() const {
  int k = 0;
  for (const auto& b : bits) k += static_cast<int>(std::count(b.begin(), b.end(), 1));
  return k;
}

bool InclusionVector::flat(int k) const {
  for (const auto& b : bits) {
    if (k < static_cast<int>(b.size())) return b[static_cast<std::size_t>(k)] != 0;
    k -= static_cast<int>(b.size());
  }
  throw DimensionError("inclusion index out of range");
}

void InclusionVector::set_flat(int k, bool value) {
  for (auto& b : bits) {
    if (k < static_cast<int>(b.size())) {
      b[static_cast<std::size_t>(k)] = value ? 1 : 0;
      return;
    }
    k -= static_cast<int>(b.size());
  }
  throw DimensionError("inclusion index out of range");
}

std::vector<int> InclusionVector::active() const {
  std::vector<int> idx;
  int k = 0;
  for (const auto& b : bits) {
    for (auto bit : b) {
      if (bit) idx.push_back(k);
      ++k;
    }
  }
  return idx;
}

std::vector<int> InclusionVector::counts() const {
  std::vector<int> c;
  for (const auto& b : bits) c.push_back(static_cast<int>(b.size()));
  return c;
}

double PriorSet::inclusion_flat(int k) const {
  for (const auto& p : inclusion_prob) {
    if (k < p.size()) return p(k);
    k -= static_cast<int>(p.size());
  }
  throw DimensionError("inclusion probability index out of range");
}

void PriorSet::validate(const ModelSpec& spec) const {
  const int m = spec.m();
  if (static_cast<int>(inclusion_prob.size()) != m) {
    throw ConfigError("prior needs one inclusion-probability vector per series");
  }
  for (int i = 0; i < m; ++i) {
    const auto& p = inclusion_prob[static_cast<std::size_t>(i)];
    if (p.size() != spec.predictor_counts[static_cast<std::size_t>(i)]) {
      throw ConfigError("inclusion probabilities for series " + std::to_string(i + 1) +
                        " do not match its predictor count");
    }
    if ((p.array() < 0.0).any() || (p.array() > 1.0).any()) {
      throw ConfigError("inclusion probabilities must lie in [0, 1]");
    }
  }
  if (prior_mean.size() != spec.total_predictors()) throw ConfigError("prior mean must have length K");
  if (!(kappa > 0.0)) throw ConfigError("kappa must be positive");
  if (!(omega > 0.0 && omega <= 1.0)) throw ConfigError("omega must lie in (0, 1]");
  if (!(v0 > m + 1)) {
    throw ConfigError("v0 must exceed m + 1 (got " + std::to_string(v0) + ")");
  }
  if (V0.rows() != m || V0.cols() != m || !is_positive_definite(V0)) {
    throw ConfigError("V0 must be an m x m positive definite matrix");
  }
  for (auto kind : kAllComponents) {
    bool used = false;
    for (const auto& s : spec.series) used = used || s.has(kind);
    if (!used) continue;
    const auto& cp = component(kind);
    if (!(cp.df > 0.0)) throw ConfigError(std::string(component_name(kind)) + " prior df must be positive");
    if (static_cast<int>(cp.scale.size()) != m) {
      throw ConfigError(std::string(component_name(kind)) + " prior needs one scale per series");
    }
    for (int i = 0; i < m; ++i) {
      if (spec.series[static_cast<std::size_t>(i)].has(kind) && !(cp.scale[static_cast<std::size_t>(i)] > 0.0)) {
        throw ConfigError(std::string(component_name(kind)) + " prior scale must be positive");
      }
    }
  }
}

PriorSet elicit_priors(const std::vector<int>& predictor_counts,
                       const std::vector<double>& expected_model_sizes, double expected_r2,
                       double v0, const MatrixXd& sigma_y, double kappa, double omega) {
  const auto m = static_cast<int>(predictor_counts.size());
  if (static_cast<int>(expected_model_sizes.size()) != m) {
    throw ConfigError("expected model size needed for every series");
  }
  if (!(v0 > m + 1)) throw ConfigError("v0 must exceed m + 1");
  if (!(expected_r2 > 0.0 && expected_r2 < 1.0)) throw ConfigError("expected R^2 must lie in (0, 1)");
  if (sigma_y.rows() != m || !is_positive_definite(sigma_y)) {
    throw ConfigError("target covariance must be m x m positive definite");
  }
  PriorSet p;
  int total = 0;
  for (int i = 0; i < m; ++i) {
    const int k = predictor_counts[static_cast<std::size_t>(i)];
    const double q = expected_model_sizes[static_cast<std::size_t>(i)];
    if (q < 0.0 || q > k) throw ConfigError("expected model size must lie in [0, k_i]");
    p.inclusion_prob.push_back(VectorXd::Constant(k, k > 0 ? q / k : 0.0));
    total += k;
  }
  p.prior_mean = VectorXd::Zero(total);
  p.kappa = kappa;
  p.omega = omega;
  p.v0 = v0;
  p.V0 = (v0 - m - 1.0) * (1.0 - expected_r2) * sigma_y;
  return p;
}

void set_default_component_priors(PriorSet& priors, const ModelSpec& spec, const MatrixXd& y,
                                  double sigma_fraction, double sample_size) {
  const int m = spec.m();
  for (auto kind : kAllComponents) {
    auto& cp = priors.component(kind);
    cp.df = sample_size;
    cp.scale.assign(static_cast<std::size_t>(m), 0.0);
    for (int i = 0; i < m; ++i) {
      double sd = 1.0;
      if (y.rows() > 1) {
        const auto col = y.col(i);
        const double mean = col.mean();
        sd = std::sqrt((col.array() - mean).square().sum() / static_cast<double>(y.rows() - 1));
        if (!(sd > 0.0)) sd = 1.0;
      }
      const double guess = sigma_fraction * sd;
      cp.scale[static_cast<std::size_t>(i)] = sample_size * guess * guess;
    }
  }
}

namespace {

// Numerical positive-definiteness: Cholesky succeeds and no pivot collapses
// relative to the largest diagonal entry.
bool well_conditioned_pd(const MatrixXd& gram) {
  Eigen::LLT<MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) return false;
  const double max_diag = gram.diagonal().maxCoeff();
  const double min_pivot = llt.matrixLLT().diagonal().minCoeff();
  return min_pivot * min_pivot > 1e-10 * max_diag;
}

}  // namespace

MatrixXd slab_information_from_gram(const MatrixXd& gram, double kappa, double omega, int n) {
  if (gram.rows() == 0) return MatrixXd(0, 0);
  const double scale = kappa / static_cast<double>(n);
  if (well_conditioned_pd(gram)) return scale * gram;
  MatrixXd fallback = omega * gram;
  fallback.diagonal() += (1.0 - omega) * gram.diagonal();
  if (!well_conditioned_pd(fallback)) {
    for (Eigen::Index j = 0; j < gram.rows(); ++j) {
      if (!(gram(j, j) > 0.0)) {
        throw NumericError("slab information matrix is singular: predictor column " +
                           std::to_string(j) + " is identically zero");
      }
    }
    throw NumericError("slab information matrix is singular even after diagonal shrinkage");
  }
  return scale * fallback;
}

MatrixXd slab_information_matrix(const MatrixXd& x_gamma, double kappa, double omega, int n) {
  if (x_gamma.cols() == 0) return MatrixXd(0, 0);
  return slab_information_from_gram(x_gamma.transpose() * x_gamma, kappa, omega, n);
}

WhitenedSystem whiten(const RegressionData& data, const MatrixXd& sigma_eps) {
  const auto n = data.y_star.rows();
  const auto m = data.y_star.cols();
  if (static_cast<Eigen::Index>(data.x_blocks.size()) != m) {
    throw DimensionError("whiten: one predictor block per series required");
  }
  if (sigma_eps.rows() != m || !is_positive_definite(sigma_eps)) {
    throw NumericError("whiten: Sigma_eps is not symmetric positive definite");
  }
  // Sigma = U^T U with U upper, so (U^{-1})^T = L^{-1} for L = U^T lower.
  const MatrixXd l = Eigen::LLT<MatrixXd>(sigma_eps).matrixL();
  const MatrixXd l_inv = l.triangularView<Eigen::Lower>().solve(MatrixXd::Identity(m, m));

  std::vector<Eigen::Index> offsets;
  Eigen::Index k_total = 0;
  for (const auto& x : data.x_blocks) {
    if (x.rows() != n) throw DimensionError("whiten: predictor block row count differs from n");
    offsets.push_back(k_total);
    k_total += x.cols();
  }

  WhitenedSystem out;
  out.y = VectorXd::Zero(n * m);
  out.x = MatrixXd::Zero(n * m, k_total);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double w = l_inv(i, j);
      if (w == 0.0) continue;
      out.y.segment(i * n, n) += w * data.y_star.col(j);
      const auto& xj = data.x_blocks[static_cast<std::size_t>(j)];
      out.x.block(i * n, offsets[static_cast<std::size_t>(j)], n, xj.cols()) += w * xj;
    }
  }
  return out;
}

RegressionDesign::RegressionDesign(std::vector<MatrixXd> x_blocks, Eigen::Index rows)
    : blocks_(std::move(x_blocks)), n_(rows) {
  int total = 0;
  for (const auto& x : blocks_) {
    if (n_ < 0) n_ = x.rows();
    if (x.rows() != n_) throw DimensionError("all predictor blocks must share the row count n");
    offsets_.push_back(total);
    counts_.push_back(static_cast<int>(x.cols()));
    total += static_cast<int>(x.cols());
  }
  if (n_ < 0) n_ = 0;
  stacked_ = MatrixXd(n_, total);
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    stacked_.middleCols(offsets_[i], counts_[i]) = blocks_[i];
  }
  if (!stacked_.allFinite()) throw NumericError("predictors contain NaN or infinite values");
  cross_ = stacked_.transpose() * stacked_;
}

MatrixXd RegressionDesign::raw_gram() const {
  MatrixXd g = MatrixXd::Zero(total(), total());
  for (int i = 0; i < m(); ++i) {
    g.block(offset(i), offset(i), count(i), count(i)) = cross_.block(offset(i), offset(i), count(i), count(i));
  }
  return g;
}

MatrixXd RegressionDesign::fit(const VectorXd& beta) const {
  if (beta.size() != total()) throw DimensionError("coefficient vector must have length K");
  MatrixXd out(n_, m());
  for (int i = 0; i < m(); ++i) {
    out.col(i) = blocks_[static_cast<std::size_t>(i)] * beta.segment(offset(i), count(i));
  }
  return out;
}

int RegressionDesign::series_of(int flat) const {
  for (int i = m() - 1; i >= 0; --i) {
    if (flat >= offset(i)) return i;
  }
  return 0;
}

ConditionalRegression::ConditionalRegression(const RegressionDesign& design, const MatrixXd& y_star,
                                             const MatrixXd& sigma_eps, const PriorSet& priors)
    : design_(&design), priors_(&priors) {
  const int m = design.m();
  if (y_star.rows() != design.n() || y_star.cols() != m) {
    throw DimensionError("Y* must be n x m matching the predictor design");
  }
  if (sigma_eps.rows() != m || sigma_eps.cols() != m || !is_positive_definite(sigma_eps)) {
    throw NumericError("Sigma_eps is not symmetric positive definite");
  }
  MatrixXd sinv = Eigen::LLT<MatrixXd>(sigma_eps).solve(MatrixXd::Identity(m, m));
  symmetrize(sinv);

  // Whitened cross products without forming the nm x K system:
  // block (j, k) of X^T (Sigma^{-1} kron I) X is Sigma^{-1}_{jk} X_j^T X_k.
  const int k_total = design.total();
  xtx_ = MatrixXd(k_total, k_total);
  const auto& cross = design.cross_gram();
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k < m; ++k) {
      xtx_.block(design.offset(j), design.offset(k), design.count(j), design.count(k)) =
          sinv(j, k) * cross.block(design.offset(j), design.offset(k), design.count(j), design.count(k));
    }
  }
  const MatrixXd weighted = y_star * sinv;
  xty_ = VectorXd(k_total);
  for (int j = 0; j < m; ++j) {
    xty_.segment(design.offset(j), design.count(j)) =
        design.blocks()[static_cast<std::size_t>(j)].transpose() * weighted.col(j);
  }
  raw_gram_ = design.raw_gram();
}

MatrixXd ConditionalRegression::slab(const std::vector<int>& idx) const {
  const auto s = static_cast<Eigen::Index>(idx.size());
  MatrixXd gram(s, s);
  for (Eigen::Index a = 0; a < s; ++a) {
    for (Eigen::Index b = 0; b < s; ++b) gram(a, b) = raw_gram_(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
  }
  try {
    return slab_information_from_gram(gram, priors_->kappa, priors_->omega, static_cast<int>(design_->n()));
  } catch (const NumericError& e) {
    std::string msg = e.what();
    for (Eigen::Index a = 0; a < s; ++a) {
      if (!(gram(a, a) > 0.0)) {
        const int flat = idx[static_cast<std::size_t>(a)];
        const int series = design_->series_of(flat);
        msg += " (series " + std::to_string(series + 1) + ", predictor " +
               std::to_string(flat - design_->offset(series) + 1) + ")";
        break;
      }
    }
    throw NumericError(msg);
  }
}

BetaPosterior ConditionalRegression::posterior(const InclusionVector& gamma) const {
  BetaPosterior post;
  post.active = gamma.active();
  const auto s = static_cast<Eigen::Index>(post.active.size());
  if (s == 0) {
    post.mean = VectorXd(0);
    post.precision = MatrixXd(0, 0);
    return post;
  }
  const MatrixXd a = slab(post.active);
  post.precision = MatrixXd(s, s);
  VectorXd rhs(s);
  VectorXd b(s);
  for (Eigen::Index i = 0; i < s; ++i) {
    const int ii = post.active[static_cast<std::size_t>(i)];
    b(i) = priors_->prior_mean(ii);
    rhs(i) = xty_(ii);
    for (Eigen::Index j = 0; j < s; ++j) post.precision(i, j) = xtx_(ii, post.active[static_cast<std::size_t>(j)]);
  }
  post.precision += a;
  rhs += a * b;
  post.mean = robust_cholesky(post.precision, "coefficient posterior precision").solve(rhs);
  return post;
}

double ConditionalRegression::log_score(const InclusionVector& gamma) const {
  double log_prior = 0.0;
  const int k_total = design_->total();
  for (int k = 0; k < k_total; ++k) {
    const double pi = priors_->inclusion_flat(k);
    const double p = gamma.flat(k) ? pi : 1.0 - pi;
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    log_prior += std::log(p);
  }
  const auto idx = gamma.active();
  const auto s = static_cast<Eigen::Index>(idx.size());
  if (s == 0) return log_prior;

  const MatrixXd a = slab(idx);
  MatrixXd prec(s, s);
  VectorXd z(s);
  VectorXd b(s);
  for (Eigen::Index i = 0; i < s; ++i) {
    const int ii = idx[static_cast<std::size_t>(i)];
    b(i) = priors_->prior_mean(ii);
    z(i) = xty_(ii);
    for (Eigen::Index j = 0; j < s; ++j) prec(i, j) = xtx_(ii, idx[static_cast<std::size_t>(j)]);
  }
  prec += a;
  const VectorXd ab = a * b;
  z += ab;
  const auto llt_a = robust_cholesky(a, "slab information matrix");
  const auto llt_p = robust_cholesky(prec, "coefficient posterior precision");
  const double quad = z.dot(llt_p.solve(z));
  return 0.5 * log_det(llt_a) - 0.5 * log_det(llt_p) + log_prior - 0.5 * (b.dot(ab) - quad);
}

VectorXd ConditionalRegression::draw_beta(const InclusionVector& gamma, Rng& rng) const {
  VectorXd beta = VectorXd::Zero(design_->total());
  const auto post = posterior(gamma);
  const auto s = static_cast<Eigen::Index>(post.active.size());
  if (s == 0) return beta;
  const auto llt = robust_cholesky(post.precision, "coefficient posterior precision");
  // precision = L L^T, so L^{-T} z has covariance precision^{-1}.
  const VectorXd noise = llt.matrixU().solve(rng.normal_vector(s));
  const VectorXd draw = post.mean + noise;
  for (Eigen::Index i = 0; i < s; ++i) beta(post.active[static_cast<std::size_t>(i)]) = draw(i);
  return beta;
}

double gamma_log_score(const InclusionVector& gamma, const MatrixXd& sigma_eps,
                       const RegressionData& data, const PriorSet& priors) {
  const RegressionDesign design(data.x_blocks, data.y_star.rows());
  return ConditionalRegression(design, data.y_star, sigma_eps, priors).log_score(gamma);
}

VectorXd draw_beta(const ConditionalRegression& cond, const InclusionVector& gamma, Rng& rng) {
  return cond.draw_beta(gamma, rng);
}

InclusionVector draw_gamma(const InclusionVector& current, const ConditionalRegression& cond,
                           Rng& rng, SsvsStats* stats) {
  InclusionVector gamma = current;
  const int k_total = gamma.total();
  std::vector<int> order(static_cast<std::size_t>(k_total));
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(std::span<int>(order));

  const auto& priors = cond.priors();
  bool have_current = false;
  double current_score = 0.0;
  for (int k : order) {
    const double pi = priors.inclusion_flat(k);
    if (pi <= 0.0 || pi >= 1.0) {
      const bool pinned = pi >= 1.0;
      if (gamma.flat(k) != pinned) {
        gamma.set_flat(k, pinned);
        have_current = false;
      }
      continue;
    }
    if (!have_current) {
      current_score = cond.log_score(gamma);
      have_current = true;
    }
    const bool bit = gamma.flat(k);
    gamma.set_flat(k, !bit);
    const double other_score = cond.log_score(gamma);
    const double s1 = bit ? current_score : other_score;
    const double s0 = bit ? other_score : current_score;
    const double p1 = 1.0 / (1.0 + std::exp(s0 - s1));
    const bool chosen = rng.uniform() < p1;
    gamma.set_flat(k, chosen);
    current_score = chosen ? s1 : s0;
    if (stats) {
      ++stats->proposals;
      if (chosen != bit) ++stats->flips;
    }
  }
  return gamma;
}

MatrixXd draw_sigma_eps(const RegressionDesign& design, const MatrixXd& y_star,
                        const VectorXd& beta, const InclusionVector& gamma, const PriorSet& priors,
                        Rng& rng) {
  if (beta.size() != design.total()) throw DimensionError("coefficient vector must have length K");
  for (int k = 0; k < design.total(); ++k) {
    if (!gamma.flat(k) && beta(k) != 0.0) {
      throw DimensionError("coefficient " + std::to_string(k) + " is nonzero but excluded by gamma");
    }
  }
  const MatrixXd resid = y_star - design.fit(beta);
  MatrixXd scale = resid.transpose() * resid + priors.V0;
  symmetrize(scale);
  if (!is_positive_definite(scale)) throw NumericError("Sigma_eps posterior scale is not positive definite");
  return draw_inverse_wishart(rng, priors.v0 + static_cast<double>(design.n()), scale);
}

}  // namespace mbsts
