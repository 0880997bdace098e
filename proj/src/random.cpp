#include "mbsts/random.hpp"

#include "mbsts/error.hpp"
#include "mbsts/linalg.hpp"

#include <cmath>
#include <limits>

namespace mbsts {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

double Rng::gamma(double shape, double scale) {
  return std::gamma_distribution<double>(shape, scale)(engine_);
}

int Rng::poisson(double mean) { return std::poisson_distribution<int>(mean)(engine_); }

Eigen::VectorXd Rng::normal_vector(Eigen::Index n) {
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = normal();
  return z;
}

std::uint64_t Rng::uniform_index(std::uint64_t bound) {
  // Rejection sampling against the largest multiple of bound.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % bound;
}

Eigen::VectorXd draw_mvn_chol(Rng& rng, const Eigen::VectorXd& mean, const Eigen::MatrixXd& lower) {
  return mean + lower.triangularView<Eigen::Lower>() * rng.normal_vector(mean.size());
}

Eigen::MatrixXd draw_inverse_wishart(Rng& rng, double df, const Eigen::MatrixXd& scale) {
  const Eigen::Index m = scale.rows();
  if (df <= static_cast<double>(m) - 1.0) {
    throw NumericError("inverse Wishart: degrees of freedom must exceed dimension - 1");
  }
  MatrixXd s = scale;
  symmetrize(s);
  const auto llt = robust_cholesky(s, "inverse Wishart scale");
  const MatrixXd l = llt.matrixL();

  // Bartlett factor A (lower) so that A A^T ~ W(df, I).
  MatrixXd a = MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    a(i, i) = std::sqrt(rng.chi_squared(df - static_cast<double>(i)));
    for (Eigen::Index j = 0; j < i; ++j) a(i, j) = rng.normal();
  }
  // W = L^{-T} A A^T L^{-1} ~ W(df, scale^{-1}); S = W^{-1} = (L A^{-T})(L A^{-T})^T.
  const MatrixXd a_inv_t =
      a.triangularView<Eigen::Lower>().solve(MatrixXd::Identity(m, m)).transpose();
  const MatrixXd root = l * a_inv_t;
  MatrixXd out = root * root.transpose();
  symmetrize(out);
  return out;
}

double draw_inverse_gamma(Rng& rng, double shape, double scale) {
  return scale / rng.gamma(shape, 1.0);
}

}  // namespace mbsts
