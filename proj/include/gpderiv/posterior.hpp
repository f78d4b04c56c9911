#pragma once

#include "gpderiv/common.hpp"
#include "gpderiv/kernel.hpp"
#include "gpderiv/linalg.hpp"
#include "gpderiv/rng.hpp"

namespace gpderiv {

/// Regression observations (x_i, y_i), x in the kernel domain.
struct Dataset {
  Vector x;
  Vector y;
};

/// Immutable fitted state of the scaled-prior GP regression: caches the
/// Cholesky factor of K(X,X) + n lambda I and the weight vector. All queries
/// run against the cached factorization and are safe to call concurrently.
class FittedGP {
 public:
  FittedGP(KernelSpec kernel, Dataset data, double lambda, double sigma2);

  const KernelSpec& kernel() const { return kernel_; }
  double lambda() const { return lambda_; }
  double sigma2() const { return sigma2_; }
  const Vector& design() const { return x_; }
  const Vector& targets() const { return y_; }
  const Vector& weights() const { return weights_; }
  double jitter_used() const { return chol_.jitter; }

  /// Lower-triangular factor of K + n lambda I (plus any jitter applied).
  Matrix factor_lower() const { return chol_.llt.matrixL(); }

  /// hat f_n^(k)(x) = K_{k0}(x, X) (K + n lambda I)^{-1} Y.
  double posterior_mean(int k, double x) const;
  Vector posterior_mean_grid(int k, const Vector& grid) const;

  /// sigma^2 (n lambda)^{-1} { K_kk(x,x') - K_k0(x,X)(K+n lambda I)^{-1} K_0k(X,x') }.
  double posterior_cov(int k, double x, double xp) const;
  Matrix posterior_cov_grid(int k, const Vector& grid) const;

  /// (K + n lambda I)^{-1} b against the cached factor.
  Vector solve(const Vector& b) const;
  Matrix solve(const Matrix& b) const;

 private:
  KernelSpec kernel_;
  double lambda_ = 0.0;
  double sigma2_ = 0.0;
  Vector x_;
  Vector y_;
  JitteredChol chol_;
  Vector weights_;
};

/// Validates the dataset and preconditions, assembles the Gram matrix, and
/// factorizes once (O(n^3)); queries afterwards cost O(n) or O(n^2).
FittedGP fit(const KernelSpec& kernel, const Dataset& data, double lambda, double sigma2);

/// Solves the ridge problem by an independently assembled route (fresh Gram,
/// Householder QR with column pivoting) and returns the sup over `grid` of
/// |KRR - posterior mean|.
double krr_check(const KernelSpec& kernel, const Dataset& data, double lambda,
                 const Vector& grid);

/// Two routes to sigma^{-2} n lambda V_n(x, x'): the cached-factor posterior
/// covariance versus K(x,x') minus a from-scratch noise-free ridge fit of
/// K(., x') observed at the design. Returns the max absolute discrepancy over
/// the grid x grid pairs.
double variance_bias_discrepancy(const KernelSpec& kernel, const Dataset& data,
                                 double lambda, const Vector& grid);

/// m rows, each a draw of f^(k) on `grid` from the posterior. The grid
/// covariance is factorized once (with jitter escalation); identical seeds
/// give identical matrices.
Matrix sample_paths(const FittedGP& fit, int k, const Vector& grid, int m, Rng& rng);

struct CredibleBand {
  Vector center;
  double radius = 0.0;
};

/// Simultaneous sup-norm band: center is the posterior mean on the grid and
/// radius the empirical `level` quantile of max_t |draw - center| over m
/// draws (anchored at zero below the smallest order statistic, so the radius
/// is nondecreasing in `level` and vanishes as level -> 0).
CredibleBand credible_band(const FittedGP& fit, int k, const Vector& grid, double level,
                           int m, Rng& rng);

}  // namespace gpderiv
