#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "rlmh/errors.hpp"

namespace rlmh {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Lower-triangular Cholesky factor L with A = L Lᵀ.
class CholFactor {
 public:
  explicit CholFactor(Matrix lower);
  int dim() const { return static_cast<int>(lower_.rows()); }
  const Matrix& lower() const { return lower_; }
  /// Factor of the same matrix scaled by s²: chol(s²A) = s·L.
  CholFactor scaled(double s) const;

 private:
  Matrix lower_;
};

/// Dense SPD matrix with its cached Cholesky factor.
class SpdMatrix {
 public:
  explicit SpdMatrix(Matrix m);
  int dim() const { return static_cast<int>(dense_.rows()); }
  const Matrix& dense() const { return dense_; }
  const CholFactor& chol() const { return chol_; }

 private:
  Matrix dense_;
  CholFactor chol_;
};

/// Factorizes a symmetric positive-definite matrix.
/// Throws NotSymmetric (relative tolerance 1e-12) or NotSpd.
CholFactor cholesky(const Matrix& m);

/// Solves (L Lᵀ) w = v.
Vector spd_solve(const CholFactor& factor, const Vector& v);

/// log det(L Lᵀ) = 2 Σ log Lᵢᵢ.
double spd_logdet(const CholFactor& factor);

/// Counter-based stream RNG (Philox2x64-10). Identical (seed, stream)
/// reproduce the same sequence; distinct streams never share counters.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  /// Uniform on [0, 1), 53-bit resolution.
  double next_uniform();
  /// Standard normal via Box-Muller (second value cached).
  double next_normal();
  Vector normal_vector(int d);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::uint64_t block_[2];
  int block_pos_ = 2;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

/// mean + L z with z i.i.d. standard normal.
Vector mvn_sample(const Vector& mean, const CholFactor& cov_factor, RngStream& rng);

/// Exact N(mean, L Lᵀ) log-density at x.
double mvn_logpdf(const Vector& x, const Vector& mean, const CholFactor& cov_factor);

}  // namespace rlmh
