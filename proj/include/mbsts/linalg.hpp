#pragma once

#include <Eigen/Dense>

#include <string_view>

namespace mbsts {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Cholesky factorisation that retries with a diagonal jitter of
/// 1e-10 * trace / dim, growing 100x per attempt, for at most three
/// escalations. Throws NumericError naming `what` when all attempts fail.
Eigen::LLT<MatrixXd> robust_cholesky(const MatrixXd& a, std::string_view what);

/// log|A| from a Cholesky factor.
double log_det(const Eigen::LLT<MatrixXd>& llt);

void symmetrize(MatrixXd& a);
double max_asymmetry(const MatrixXd& a);

bool is_positive_definite(const MatrixXd& a);

/// Lower Cholesky factor of a positive semidefinite matrix. Rows/columns
/// with zero variance produce zero columns instead of failing.
MatrixXd psd_square_root(const MatrixXd& a);

}  // namespace mbsts
