#pragma once

#include <cmath>
#include <limits>
#include <cstdint>
#include <random>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/LU>

#include "rblspi/error.hpp"

namespace rblspi {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Seed-deterministic generator. Identical seed and call sequence give an
// identical stream within one build.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  // Derive an independent stream from a base seed and a list of salts.
  template <typename... Salt>
  static SeededRng derive(std::uint64_t base, Salt... salt) {
    std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                      static_cast<std::uint32_t>(salt)...};
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    return SeededRng((static_cast<std::uint64_t>(words[0]) << 32) | words[1]);
  }

  std::uint64_t seed() const { return seed_; }

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  std::size_t uniform_index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }
  double normal() { return normal_(engine_); }
  double normal(double mean, double stddev) { return mean + stddev * normal_(engine_); }

  Vector standard_normal(Eigen::Index dim) {
    Vector z(dim);
    for (Eigen::Index i = 0; i < dim; ++i) z[i] = normal_(engine_);
    return z;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

namespace detail {

inline void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols())
    throw DimensionMismatch(std::string(what) + ": matrix is " + std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()) + ", expected square");
}

inline void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw InvalidArgument(std::string(what) + ": non-finite entry");
}

inline void require_symmetric(const Matrix& m, const char* what) {
  const double scale = 1.0 + m.cwiseAbs().maxCoeff();
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale)
    throw InvalidArgument(std::string(what) + ": matrix is not symmetric");
}

inline Eigen::LLT<Matrix> factor_spd(const Matrix& m, const char* what) {
  require_square(m, what);
  require_finite(m, what);
  require_symmetric(m, what);
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite(std::string(what) + ": non-positive pivot in Cholesky factorisation");
  return llt;
}

}  // namespace detail

/// Lower-triangular L with L Lᵀ = m. Strict upper entries are exactly zero.
inline Matrix cholesky(const Matrix& m) {
  auto llt = detail::factor_spd(m, "cholesky");
  return llt.matrixL();
}

inline Vector solve_spd(const Matrix& m, const Vector& v) {
  if (m.rows() != v.size()) throw DimensionMismatch("solve_spd: dimension mismatch");
  auto llt = detail::factor_spd(m, "solve_spd");
  return llt.solve(v);
}

/// Inverse of an SPD matrix, symmetrised as (X + Xᵀ)/2.
inline Matrix invert_spd(const Matrix& m) {
  auto llt = detail::factor_spd(m, "invert_spd");
  Matrix x = llt.solve(Matrix::Identity(m.rows(), m.cols()));
  return 0.5 * (x + x.transpose());
}

/// Partially pivoted solve for a general square system.
inline Vector solve_general(const Matrix& m, const Vector& v) {
  detail::require_square(m, "solve_general");
  if (m.rows() != v.size()) throw DimensionMismatch("solve_general: dimension mismatch");
  detail::require_finite(m, "solve_general");
  Eigen::PartialPivLU<Matrix> lu(m);
  if (!(lu.rcond() > std::numeric_limits<double>::epsilon()))
    throw SingularSystem("solve_general: system is singular");
  Vector x = lu.solve(v);
  if (!x.allFinite()) throw SingularSystem("solve_general: system is singular");
  const double residual = (m * x - v).cwiseAbs().maxCoeff();
  const double scale = 1.0 + v.cwiseAbs().maxCoeff() + m.cwiseAbs().maxCoeff() * x.cwiseAbs().maxCoeff();
  if (!(residual <= 1e-6 * scale)) throw SingularSystem("solve_general: system is numerically singular");
  return x;
}

/// Draw mean + L z, z ~ N(0, I), with L the Cholesky factor of cov.
/// A failed factorisation is retried with jitter 1e-10 .. 1e-4 on the diagonal.
inline Vector sample_mvn(const Vector& mean, const Matrix& cov, SeededRng& rng) {
  detail::require_square(cov, "sample_mvn");
  if (cov.rows() != mean.size()) throw DimensionMismatch("sample_mvn: dimension mismatch");
  detail::require_finite(cov, "sample_mvn");
  detail::require_symmetric(cov, "sample_mvn");
  Eigen::LLT<Matrix> llt(cov);
  double jitter = 1e-10;
  while (llt.info() != Eigen::Success) {
    if (jitter > 1e-4 * (1.0 + 1e-9))
      throw NotPositiveDefinite("sample_mvn: covariance not positive definite after jitter");
    llt.compute(cov + jitter * Matrix::Identity(cov.rows(), cov.cols()));
    jitter *= 10.0;
  }
  return mean + llt.matrixL() * rng.standard_normal(mean.size());
}

/// Draw from N(mean, P⁻¹) given the lower Cholesky factor L of the precision P = L Lᵀ.
/// mean + L⁻ᵀ z has covariance (L Lᵀ)⁻¹.
inline Vector sample_mvn_precision(const Vector& mean, const Matrix& precision_factor, SeededRng& rng) {
  if (precision_factor.rows() != mean.size()) throw DimensionMismatch("sample_mvn_precision: dimension mismatch");
  Vector z = rng.standard_normal(mean.size());
  precision_factor.triangularView<Eigen::Lower>().transpose().solveInPlace(z);
  return mean + z;
}

}  // namespace rblspi
