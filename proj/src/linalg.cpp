#include "mbsts/linalg.hpp"

#include "mbsts/error.hpp"

#include <cmath>
#include <string>

namespace mbsts {

Eigen::LLT<MatrixXd> robust_cholesky(const MatrixXd& a, std::string_view what) {
  Eigen::LLT<MatrixXd> llt(a);
  if (llt.info() == Eigen::Success && a.allFinite()) return llt;
  if (!a.allFinite()) {
    throw NumericError(std::string(what) + ": matrix has non-finite entries");
  }
  const auto dim = static_cast<double>(a.rows());
  const double base = std::abs(a.trace()) / std::max(dim, 1.0);
  double jitter = 1e-10 * (base > 0.0 ? base : 1.0);
  for (int attempt = 0; attempt < 3; ++attempt) {
    MatrixXd b = a;
    b.diagonal().array() += jitter;
    llt.compute(b);
    if (llt.info() == Eigen::Success) return llt;
    jitter *= 100.0;
  }
  throw NumericError(std::string(what) + ": matrix is not positive definite");
}

double log_det(const Eigen::LLT<MatrixXd>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

void symmetrize(MatrixXd& a) {
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < a.cols(); ++j) {
      const double s = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = s;
      a(j, i) = s;
    }
  }
}

double max_asymmetry(const MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  return (a - a.transpose()).cwiseAbs().maxCoeff();
}

bool is_positive_definite(const MatrixXd& a) {
  if (a.rows() != a.cols() || !a.allFinite()) return false;
  if (a.rows() == 0) return true;
  Eigen::LLT<MatrixXd> llt(a);
  return llt.info() == Eigen::Success;
}

MatrixXd psd_square_root(const MatrixXd& a) {
  const Eigen::Index d = a.rows();
  MatrixXd l = MatrixXd::Zero(d, d);
  // Plain column Cholesky that tolerates exact zero pivots.
  for (Eigen::Index j = 0; j < d; ++j) {
    double diag = a(j, j) - l.row(j).head(j).squaredNorm();
    if (diag <= 1e-300) continue;
    const double root = std::sqrt(diag);
    l(j, j) = root;
    for (Eigen::Index i = j + 1; i < d; ++i) {
      l(i, j) = (a(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / root;
    }
  }
  return l;
}

}  // namespace mbsts
