#pragma once

#include <vector>

#include "rblspi/numerics.hpp"
#include "support/oracles.hpp"

namespace testing_support {

inline oracle::Mat to_oracle(const rblspi::Matrix& m) {
  oracle::Mat out = oracle::zeros(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j);
  return out;
}

inline oracle::Vec to_oracle(const rblspi::Vector& v) { return {v.data(), v.data() + v.size()}; }

inline rblspi::Vector from_oracle(const oracle::Vec& v) {
  rblspi::Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
  return out;
}

inline rblspi::Matrix from_oracle(const oracle::Mat& m) {
  rblspi::Matrix out(static_cast<Eigen::Index>(m.size()), m.empty() ? 0 : static_cast<Eigen::Index>(m[0].size()));
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    for (Eigen::Index j = 0; j < out.cols(); ++j) out(i, j) = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return out;
}

inline rblspi::Matrix random_matrix(Eigen::Index r, Eigen::Index c, rblspi::SeededRng& rng) {
  rblspi::Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.normal();
  return m;
}

// GᵀG + I
inline rblspi::Matrix random_spd(Eigen::Index n, rblspi::SeededRng& rng) {
  const rblspi::Matrix g = random_matrix(n, n, rng);
  return g.transpose() * g + rblspi::Matrix::Identity(n, n);
}

inline double max_abs(const rblspi::Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace testing_support
