#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "rblspi/error.hpp"
#include "rblspi/numerics.hpp"

namespace rblspi {

using State = Eigen::VectorXd;

struct Interval {
  double lower = 0.0;
  double upper = 1.0;
};

// A feature map replicates one per-state block for every action:
// φ(s, a) = [0 … 0, block(s), 0 … 0] with block(s) at offset a · block_size.
template <typename F>
concept BlockFeatureMap = requires(const F& f, const State& s, Eigen::Index a) {
  { f.k() } -> std::convertible_to<Eigen::Index>;
  { f.block_size() } -> std::convertible_to<Eigen::Index>;
  { f.action_count() } -> std::convertible_to<Eigen::Index>;
  { f.block(s) } -> std::convertible_to<Vector>;
};

template <BlockFeatureMap F>
inline void check_action(const F& fm, Eigen::Index action) {
  if (action < 0 || action >= fm.action_count())
    throw ActionOutOfRange("action " + std::to_string(action) + " outside [0, " +
                           std::to_string(fm.action_count()) + ")");
}

/// Scatter a per-state block into the full k-vector for `action`.
template <BlockFeatureMap F>
Vector scatter(const F& fm, const Vector& block, Eigen::Index action) {
  check_action(fm, action);
  Vector phi = Vector::Zero(fm.k());
  phi.segment(action * fm.block_size(), fm.block_size()) = block;
  return phi;
}

template <BlockFeatureMap F>
Vector evaluate(const F& fm, const State& s, Eigen::Index action) {
  check_action(fm, action);
  return scatter(fm, fm.block(s), action);
}

/// Linear feature map: Gaussian RBF grid (optionally with a constant term) or
/// a scalar polynomial basis, replicated per action.
class FeatureMap {
 public:
  enum class Kind { rbf_grid, polynomial };

  static FeatureMap rbf_grid(std::vector<Interval> bounds, std::vector<int> grid, int action_count,
                             bool include_constant) {
    if (bounds.size() != grid.size() || bounds.empty())
      throw DimensionMismatch("rbf_grid: bounds and grid must have equal, non-zero length");
    if (action_count < 1) throw InvalidArgument("rbf_grid: action_count must be >= 1");
    for (const auto& b : bounds)
      if (!(b.lower < b.upper) || !std::isfinite(b.lower) || !std::isfinite(b.upper))
        throw InvalidBounds("rbf_grid: lower bound must be strictly below upper bound");
    for (int n : grid)
      if (n < 1) throw InvalidArgument("rbf_grid: grid counts must be >= 1");

    FeatureMap fm;
    fm.kind_ = Kind::rbf_grid;
    fm.bounds_ = std::move(bounds);
    fm.grid_ = std::move(grid);
    fm.actions_ = action_count;
    fm.constant_ = include_constant;
    Eigen::Index centres = 1;
    for (int n : fm.grid_) centres *= n;
    fm.centre_count_ = centres;
    fm.block_ = centres + (include_constant ? 1 : 0);

    // One grid spacing in normalised coordinates.
    fm.inv_two_sigma_sq_.resize(fm.grid_.size());
    for (std::size_t d = 0; d < fm.grid_.size(); ++d) {
      const double sigma = fm.grid_[d] > 1 ? 1.0 / (fm.grid_[d] - 1) : 1.0;
      fm.inv_two_sigma_sq_[d] = 1.0 / (2.0 * sigma * sigma);
    }
    return fm;
  }

  /// Polynomial basis (1, s̄, …, s̄^degree) over a scalar state normalised by `bounds`.
  static FeatureMap polynomial(int degree, int action_count, Interval bounds = {0.0, 1.0}) {
    if (degree < 0) throw InvalidArgument("polynomial: degree must be >= 0");
    if (action_count < 1) throw InvalidArgument("polynomial: action_count must be >= 1");
    if (!(bounds.lower < bounds.upper)) throw InvalidBounds("polynomial: lower bound must be below upper bound");
    FeatureMap fm;
    fm.kind_ = Kind::polynomial;
    fm.bounds_ = {bounds};
    fm.degree_ = degree;
    fm.actions_ = action_count;
    fm.block_ = degree + 1;
    return fm;
  }

  Kind kind() const { return kind_; }
  Eigen::Index k() const { return actions_ * block_; }
  Eigen::Index block_size() const { return block_; }
  Eigen::Index action_count() const { return actions_; }
  Eigen::Index state_dim() const { return static_cast<Eigen::Index>(bounds_.size()); }
  const std::vector<Interval>& bounds() const { return bounds_; }
  const std::vector<int>& grid() const { return grid_; }
  int degree() const { return degree_; }
  bool has_constant() const { return constant_; }

  /// State mapped into [0, 1]^d, clamped to the configured bounds.
  Vector normalise(const State& s) const {
    if (s.size() != state_dim()) throw DimensionMismatch("feature map: state dimension mismatch");
    Vector u(s.size());
    for (Eigen::Index d = 0; d < s.size(); ++d) {
      const auto& b = bounds_[static_cast<std::size_t>(d)];
      u[d] = std::clamp((s[d] - b.lower) / (b.upper - b.lower), 0.0, 1.0);
    }
    return u;
  }

  /// Per-action feature block at s. Grid features are ordered row-major over
  /// dimensions (first dimension slowest), the constant term last.
  Vector block(const State& s) const {
    const Vector u = normalise(s);
    Vector out(block_);
    if (kind_ == Kind::polynomial) {
      double p = 1.0;
      for (int i = 0; i <= degree_; ++i) {
        out[i] = p;
        p *= u[0];
      }
      return out;
    }

    // Separable Gaussian: exp(-‖u - c‖²/2σ²) = Π_d exp(-(u_d - c_d)²/2σ_d²).
    const std::size_t dims = grid_.size();
    std::vector<std::vector<double>> factors(dims);
    for (std::size_t d = 0; d < dims; ++d) {
      const int n = grid_[d];
      factors[d].resize(static_cast<std::size_t>(n));
      for (int j = 0; j < n; ++j) {
        const double c = n > 1 ? static_cast<double>(j) / (n - 1) : 0.5;
        const double diff = u[static_cast<Eigen::Index>(d)] - c;
        factors[d][static_cast<std::size_t>(j)] = std::exp(-diff * diff * inv_two_sigma_sq_[d]);
      }
    }
    std::vector<int> idx(dims, 0);
    for (Eigen::Index i = 0; i < centre_count_; ++i) {
      double v = 1.0;
      for (std::size_t d = 0; d < dims; ++d) v *= factors[d][static_cast<std::size_t>(idx[d])];
      out[i] = v;
      for (std::size_t d = dims; d-- > 0;) {
        if (++idx[d] < grid_[d]) break;
        idx[d] = 0;
      }
    }
    if (constant_) out[block_ - 1] = 1.0;
    return out;
  }

  /// Centre of RBF `index` in normalised coordinates.
  Vector centre(Eigen::Index index) const {
    Vector c(static_cast<Eigen::Index>(grid_.size()));
    for (std::size_t d = grid_.size(); d-- > 0;) {
      const int n = grid_[d];
      const int j = static_cast<int>(index % n);
      index /= n;
      c[static_cast<Eigen::Index>(d)] = n > 1 ? static_cast<double>(j) / (n - 1) : 0.5;
    }
    return c;
  }

 private:
  FeatureMap() = default;

  Kind kind_ = Kind::polynomial;
  std::vector<Interval> bounds_;
  std::vector<int> grid_;
  std::vector<double> inv_two_sigma_sq_;
  int degree_ = 0;
  Eigen::Index actions_ = 1;
  Eigen::Index centre_count_ = 0;
  Eigen::Index block_ = 1;
  bool constant_ = false;
};

static_assert(BlockFeatureMap<FeatureMap>);

}  // namespace rblspi
