#pragma once

#include <cmath>
#include <cstddef>
#include <utility>

#include "rblspi/env/environment.hpp"
#include "rblspi/features.hpp"
#include "rblspi/numerics.hpp"

namespace rblspi {

inline constexpr double kDefaultRidge = 1e-6;

/// Accumulated LSTD statistics:
///   A = Σ φ (φ - γ φ')ᵀ,  C = Σ φ φᵀ,  b = Σ φ r.
struct SufficientStats {
  Matrix A;
  Matrix C;
  Vector b;
  std::size_t n = 0;

  SufficientStats() = default;
  explicit SufficientStats(Eigen::Index k) : A(Matrix::Zero(k, k)), C(Matrix::Zero(k, k)), b(Vector::Zero(k)) {}

  Eigen::Index k() const { return b.size(); }

  SufficientStats& operator+=(const SufficientStats& other) {
    if (other.k() != k()) throw DimensionMismatch("SufficientStats: dimension mismatch");
    A += other.A;
    C += other.C;
    b += other.b;
    n += other.n;
    return *this;
  }
};

/// Greedy index among the per-action values block · θ_a; ties go to the lowest index.
inline int greedy_action(const Vector& theta, const Vector& block, Eigen::Index actions) {
  const Eigen::Index width = block.size();
  int best = 0;
  double best_value = block.dot(theta.segment(0, width));
  for (Eigen::Index a = 1; a < actions; ++a) {
    const double v = block.dot(theta.segment(a * width, width));
    if (v > best_value) {
      best_value = v;
      best = static_cast<int>(a);
    }
  }
  return best;
}

/// Q_θ(s, a) = φ(s, a)ᵀ θ with its greedy policy.
template <BlockFeatureMap F>
class LinearQPolicy {
 public:
  LinearQPolicy(Vector theta, const F& fm) : theta_(std::move(theta)), fm_(&fm) {
    if (theta_.size() != fm.k()) throw DimensionMismatch("LinearQPolicy: theta has wrong dimension");
  }

  const Vector& theta() const { return theta_; }
  const F& feature_map() const { return *fm_; }

  double q(const State& s, Eigen::Index action) const {
    check_action(*fm_, action);
    const Eigen::Index w = fm_->block_size();
    return fm_->block(s).dot(theta_.segment(action * w, w));
  }

  int greedy(const State& s) const { return greedy_action(theta_, fm_->block(s), fm_->action_count()); }
  int greedy_from_block(const Vector& block) const { return greedy_action(theta_, block, fm_->action_count()); }

 private:
  Vector theta_;
  const F* fm_;
};

/// Rank-one update of the statistics from pre-computed feature blocks.
/// `next_block` is ignored when `terminal` (φ' = 0).
inline void accumulate_blocks(SufficientStats& stats, const Vector& block, Eigen::Index action, double reward,
                              const Vector& next_block, Eigen::Index next_action, bool terminal, double gamma,
                              double weight = 1.0) {
  const Eigen::Index w = block.size();
  const Eigen::Index row = action * w;
  if (row + w > stats.k()) throw DimensionMismatch("accumulate: feature block outside statistics");
  stats.C.block(row, row, w, w).noalias() += (weight * block) * block.transpose();
  stats.A.block(row, row, w, w).noalias() += (weight * block) * block.transpose();
  if (!terminal && gamma != 0.0) {
    if (next_block.size() != w) throw DimensionMismatch("accumulate: successor block has wrong size");
    const Eigen::Index col = next_action * w;
    stats.A.block(row, col, w, w).noalias() -= (weight * gamma * block) * next_block.transpose();
  }
  stats.b.segment(row, w) += (weight * reward) * block;
  ++stats.n;
}

/// Add one transition with successor action greedy w.r.t. `eval_policy`.
template <BlockFeatureMap F>
void accumulate(SufficientStats& stats, const Transition& t, const LinearQPolicy<F>& eval_policy, double gamma,
                double weight = 1.0) {
  const F& fm = eval_policy.feature_map();
  if (stats.k() != fm.k()) throw DimensionMismatch("accumulate: statistics and features disagree on k");
  check_action(fm, t.a);
  const Vector block = fm.block(t.s);
  if (t.terminal) {
    accumulate_blocks(stats, block, t.a, t.r, block, 0, true, gamma, weight);
    return;
  }
  const Vector next = fm.block(t.s_next);
  accumulate_blocks(stats, block, t.a, t.r, next, eval_policy.greedy_from_block(next), false, gamma, weight);
}

/// θ* = (A + ridge·I)⁻¹ b.
inline Vector lstd_solve(const SufficientStats& stats, double ridge = kDefaultRidge) {
  if (ridge < 0.0) throw InvalidArgument("lstd_solve: ridge must be >= 0");
  const Matrix a = stats.A + ridge * Matrix::Identity(stats.k(), stats.k());
  return solve_general(a, stats.b);
}

/// E_D(θ) = (Aθ - b)ᵀ (C + ridge·I)⁻¹ (Aθ - b).
inline double empirical_mspbe(const SufficientStats& stats, const Vector& theta, double ridge = kDefaultRidge) {
  if (theta.size() != stats.k()) throw DimensionMismatch("empirical_mspbe: theta has wrong dimension");
  const Vector residual = stats.A * theta - stats.b;
  const Matrix c = stats.C + ridge * Matrix::Identity(stats.k(), stats.k());
  return std::max(0.0, residual.dot(solve_spd(c, residual)));
}

/// Gaussian posterior N(m, S) over value-function parameters.
struct Posterior {
  Vector m;
  Matrix S;
  double alpha = 1.0;
  double beta = 1.0;
};

/// Posterior mean together with the lower Cholesky factor of the precision
/// S⁻¹ = αI + βAᵀC⁻¹A. Enough to sample without forming S.
struct PosteriorFactor {
  Vector m;
  Matrix precision_factor;
  double alpha = 1.0;
  double beta = 1.0;

  Matrix covariance() const {
    const Eigen::Index k = m.size();
    Matrix inv_l = precision_factor.triangularView<Eigen::Lower>().solve(Matrix::Identity(k, k));
    Matrix s = inv_l.transpose() * inv_l;
    return 0.5 * (s + s.transpose());
  }
};

inline PosteriorFactor blstd_factor(const SufficientStats& stats, double alpha, double beta,
                                    double ridge = kDefaultRidge) {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw InvalidArgument("blstd: alpha and beta must be > 0");
  const Eigen::Index k = stats.k();
  PosteriorFactor out;
  out.alpha = alpha;
  out.beta = beta;
  if (stats.n == 0) {
    out.m = Vector::Zero(k);
    out.precision_factor = std::sqrt(alpha) * Matrix::Identity(k, k);
    return out;
  }
  // C_r = L Lᵀ, W = L⁻¹ A so that Σ = AᵀC_r⁻¹A = WᵀW.
  auto c_llt = detail::factor_spd(stats.C + ridge * Matrix::Identity(k, k), "blstd: C");
  const auto l = c_llt.matrixL();
  const Matrix w = l.solve(stats.A);
  const Vector u = l.solve(stats.b);
  Matrix precision = Matrix::Identity(k, k) * alpha;
  // Only the lower triangle is filled; LLT reads nothing else.
  precision.selfadjointView<Eigen::Lower>().rankUpdate(w.transpose(), beta);
  Eigen::LLT<Matrix> p_llt(precision);
  if (p_llt.info() != Eigen::Success) throw NotPositiveDefinite("blstd: posterior precision not positive definite");
  out.m = p_llt.solve(beta * (w.transpose() * u));
  if (!out.m.allFinite()) throw NotPositiveDefinite("blstd: non-finite posterior mean");
  out.precision_factor = p_llt.matrixL();
  return out;
}

/// S = (αI + βAᵀC̃⁻¹A)⁻¹, m = βSAᵀC̃⁻¹b with C̃ = C + ridge·I. n = 0 gives the prior.
inline Posterior blstd_posterior(const SufficientStats& stats, double alpha, double beta,
                                 double ridge = kDefaultRidge) {
  PosteriorFactor f = blstd_factor(stats, alpha, beta, ridge);
  Matrix s = f.covariance();
  return {std::move(f.m), std::move(s), alpha, beta};
}

struct Prediction {
  double mean = 0.0;
  double variance = 0.0;
};

template <BlockFeatureMap F>
Prediction predict_q(const Posterior& post, const F& fm, const State& s, Eigen::Index action) {
  const Vector phi = evaluate(fm, s, action);
  if (phi.size() != post.m.size()) throw DimensionMismatch("predict_q: posterior and features disagree on k");
  return {phi.dot(post.m), std::max(0.0, phi.dot(post.S * phi))};
}

template <BlockFeatureMap F>
LinearQPolicy<F> sample_policy(const Posterior& post, const F& fm, SeededRng& rng) {
  return LinearQPolicy<F>(sample_mvn(post.m, post.S, rng), fm);
}

}  // namespace rblspi
