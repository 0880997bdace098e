#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <span>

namespace mbsts {

/// SplitMix64 mix of (master, stream); used to derive independent
/// sub-stream seeds from one master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// Seeded random stream. Copyable; a copy continues the same sequence.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  std::uint64_t seed() const { return seed_; }

  /// Independent stream keyed by `stream`, derived from the construction seed
  /// (not from the current position) so derivation order does not matter.
  Rng split(std::uint64_t stream) const { return Rng(derive_seed(seed_, stream)); }

  double normal() { return normal_(engine_); }
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  bool bernoulli(double p) { return uniform() < p; }
  double gamma(double shape, double scale = 1.0);
  double chi_squared(double df) { return gamma(0.5 * df, 2.0); }
  int poisson(double mean);

  Eigen::VectorXd normal_vector(Eigen::Index n);

  template <typename T>
  void shuffle(std::span<T> values) {
    // Fisher-Yates on our own uniform draws keeps the order independent of the
    // standard library's shuffle implementation.
    for (std::size_t i = values.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_index(i));
      std::swap(values[i - 1], values[j]);
    }
  }

  std::uint64_t uniform_index(std::uint64_t bound);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

/// Draw from N(mean, L L^T) given the lower factor L.
Eigen::VectorXd draw_mvn_chol(Rng& rng, const Eigen::VectorXd& mean, const Eigen::MatrixXd& lower);

/// Draw from the inverse Wishart IW(df, scale), density proportional to
/// |S|^{-(df+m+1)/2} exp(-tr(scale S^{-1}) / 2). Requires df > m - 1.
Eigen::MatrixXd draw_inverse_wishart(Rng& rng, double df, const Eigen::MatrixXd& scale);

/// Inverse gamma with density proportional to x^{-shape-1} exp(-scale / x).
double draw_inverse_gamma(Rng& rng, double shape, double scale);

}  // namespace mbsts
