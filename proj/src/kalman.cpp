#include "mbsts/kalman.hpp"

#include "mbsts/error.hpp"
#include "mbsts/linalg.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace mbsts {
namespace {

void check_inputs(const StateSpaceSystem& ss, const MatrixXd& obs_cov, const MatrixXd& y) {
  const auto m = ss.Z.cols();
  if (obs_cov.rows() != m || obs_cov.cols() != m) {
    throw DimensionError("observation covariance must be m x m");
  }
  if (y.rows() > 0 && y.cols() != m) throw DimensionError("observations must have m columns");
  if (!y.allFinite()) throw NumericError("observations contain NaN or infinite values");
  if (!is_positive_definite(obs_cov)) {
    throw NumericError("observation covariance is not positive definite");
  }
}

// Lean forward pass shared by the public filter and the simulation smoother.
// Stores only what the backward mean recursion needs unless `full` is set.
struct ForwardPass {
  std::vector<VectorXd> a;      // predicted means
  std::vector<MatrixXd> p;      // predicted covs
  std::vector<VectorXd> v;      // innovations
  std::vector<MatrixXd> finv;   // innovation precision
  std::vector<MatrixXd> gain;   // P Z F^{-1}
  std::vector<VectorXd> af;     // filtered means (full only)
  std::vector<MatrixXd> pf;     // filtered covs (full only)
  double loglik = 0.0;
};

ForwardPass forward(const StateSpaceSystem& ss, const MatrixXd& obs_cov, const MatrixXd& y,
                    const VectorXd& initial_mean, bool with_intercept, bool full) {
  const auto n = y.rows();
  const auto m = ss.Z.cols();
  const auto d = ss.T.rows();
  ForwardPass out;
  out.a.resize(static_cast<std::size_t>(n));
  out.p.resize(static_cast<std::size_t>(n));
  out.v.resize(static_cast<std::size_t>(n));
  out.finv.resize(static_cast<std::size_t>(n));
  out.gain.resize(static_cast<std::size_t>(n));
  if (full) {
    out.af.resize(static_cast<std::size_t>(n));
    out.pf.resize(static_cast<std::size_t>(n));
  }

  const MatrixXd rqr = ss.R * ss.Q * ss.R.transpose();
  const MatrixXd zt = ss.Z.transpose();
  const MatrixXd identity_m = MatrixXd::Identity(m, m);
  const double log_2pi = std::log(2.0 * std::numbers::pi);

  VectorXd a = initial_mean;
  MatrixXd p = ss.initial_cov;
  MatrixXd pz(d, m);
  MatrixXd f(m, m);
  MatrixXd k(d, m);
  MatrixXd pfilt(d, d);
  VectorXd afilt(d);
  MatrixXd tp(d, d);

  for (Eigen::Index t = 0; t < n; ++t) {
    const auto ti = static_cast<std::size_t>(t);
    out.a[ti] = a;
    out.p[ti] = p;

    pz.noalias() = p * ss.Z;
    f.noalias() = zt * pz;
    f += obs_cov;
    symmetrize(f);
    const auto llt = robust_cholesky(f, "innovation covariance at t=" + std::to_string(t + 1));
    MatrixXd finv = llt.solve(identity_m);
    symmetrize(finv);

    VectorXd v = y.row(t).transpose() - zt * a;
    out.loglik -= 0.5 * (static_cast<double>(m) * log_2pi + log_det(llt) + v.dot(finv * v));

    k.noalias() = pz * finv;
    afilt = a;
    afilt.noalias() += k * v;
    pfilt = p;
    pfilt.noalias() -= k * pz.transpose();
    symmetrize(pfilt);

    a.noalias() = ss.T * afilt;
    if (with_intercept) a += ss.intercept;
    tp.noalias() = ss.T * pfilt;
    p.noalias() = tp * ss.T.transpose();
    p += rqr;
    symmetrize(p);

    out.v[ti] = std::move(v);
    out.finv[ti] = std::move(finv);
    out.gain[ti] = k;
    if (full) {
      out.af[ti] = afilt;
      out.pf[ti] = pfilt;
    }
  }
  return out;
}

// Backward mean recursion: r_{t-1} = Z F^{-1} v_t + L_t^T r_t with
// L_t = T - T K_t Z^T, smoothed mean a_t + P_t r_{t-1}.
MatrixXd backward_means(const StateSpaceSystem& ss, const ForwardPass& fp) {
  const auto n = static_cast<Eigen::Index>(fp.a.size());
  const auto d = ss.T.rows();
  MatrixXd out(n, d);
  VectorXd r = VectorXd::Zero(d);
  VectorXd u(d);
  for (Eigen::Index t = n - 1; t >= 0; --t) {
    const auto ti = static_cast<std::size_t>(t);
    u.noalias() = ss.T.transpose() * r;
    const VectorXd w = fp.finv[ti] * fp.v[ti] - fp.gain[ti].transpose() * u;
    r = u;
    r.noalias() += ss.Z * w;
    out.row(t) = (fp.a[ti] + fp.p[ti] * r).transpose();
  }
  return out;
}

}  // namespace

FilterResult kalman_filter(const StateSpaceSystem& ss, const MatrixXd& obs_cov, const MatrixXd& y) {
  check_inputs(ss, obs_cov, y);
  auto fp = forward(ss, obs_cov, y, ss.initial_mean, true, true);
  FilterResult fr;
  fr.predicted_means = std::move(fp.a);
  fr.predicted_covs = std::move(fp.p);
  fr.filtered_means = std::move(fp.af);
  fr.filtered_covs = std::move(fp.pf);
  fr.innovations = std::move(fp.v);
  fr.innovation_precisions = std::move(fp.finv);
  fr.filter_gains = std::move(fp.gain);
  fr.log_likelihood = fp.loglik;
  return fr;
}

std::vector<SmoothedState> kalman_smoother(const FilterResult& fr, const StateSpaceSystem& ss) {
  const std::size_t n = fr.size();
  if (fr.predicted_covs.size() != n || fr.innovations.size() != n ||
      fr.innovation_precisions.size() != n || fr.filter_gains.size() != n) {
    throw DimensionError("kalman_smoother: filter result has mismatched lengths");
  }
  const auto d = ss.T.rows();
  std::vector<SmoothedState> out(n);
  VectorXd r = VectorXd::Zero(d);
  MatrixXd big_n = MatrixXd::Zero(d, d);
  for (std::size_t i = n; i-- > 0;) {
    if (fr.predicted_means[i].size() != d) throw DimensionError("kalman_smoother: state size mismatch");
    // L = T (I - K Z^T) with K the filtered gain P Z F^{-1}.
    const MatrixXd l = ss.T - ss.T * fr.filter_gains[i] * ss.Z.transpose();
    r = ss.Z * (fr.innovation_precisions[i] * fr.innovations[i]) + l.transpose() * r;
    big_n = ss.Z * fr.innovation_precisions[i] * ss.Z.transpose() + l.transpose() * big_n * l;
    symmetrize(big_n);
    const MatrixXd& p = fr.predicted_covs[i];
    out[i].mean = fr.predicted_means[i] + p * r;
    out[i].cov = p - p * big_n * p;
    symmetrize(out[i].cov);
  }
  return out;
}

StatePathDraw simulation_smoother(const StateSpaceSystem& ss, const MatrixXd& obs_cov,
                                  const MatrixXd& y, Rng& rng) {
  check_inputs(ss, obs_cov, y);
  const auto n = y.rows();
  const auto m = ss.Z.cols();
  const auto d = ss.T.rows();
  const auto q = ss.R.cols();

  // Unconditional pseudo-path alpha+ and pseudo-observations y+.
  const MatrixXd init_root = psd_square_root(ss.initial_cov);
  const MatrixXd q_root = psd_square_root(ss.Q);
  const MatrixXd obs_root = robust_cholesky(obs_cov, "observation covariance").matrixL();
  MatrixXd alpha_plus(n, d);
  MatrixXd y_star(n, m);
  VectorXd state = ss.initial_mean + init_root * rng.normal_vector(d);
  for (Eigen::Index t = 0; t < n; ++t) {
    alpha_plus.row(t) = state.transpose();
    const VectorXd eps = obs_root * rng.normal_vector(m);
    y_star.row(t) = y.row(t) - (ss.Z.transpose() * state + eps).transpose();
    if (t + 1 < n) state = ss.T * state + ss.intercept + ss.R * (q_root * rng.normal_vector(q));
  }

  // Smoothing is affine in (y, mu0, c); smoothing y - y+ with both set to
  // zero yields E[alpha|y] - E[alpha+|y+] directly.
  const auto fp = forward(ss, obs_cov, y_star, VectorXd::Zero(d), false, false);
  StatePathDraw draw;
  draw.alpha = alpha_plus + backward_means(ss, fp);
  return draw;
}

}  // namespace mbsts
