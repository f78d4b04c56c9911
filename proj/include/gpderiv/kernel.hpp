#pragma once

#include <memory>
#include <string>

#include "gpderiv/basis.hpp"
#include "gpderiv/common.hpp"
#include "gpderiv/eigenseq.hpp"

namespace gpderiv {

/// An immutable Mercer kernel on a closed interval. Closed-form families
/// (Matern, squared exponential, second-order Sobolev) evaluate analytic
/// cross-derivative formulas; spectral kernels evaluate a truncated
/// eigenexpansion over one of the provided bases.
///
/// All operations are pure and safe to call concurrently.
class KernelSpec {
 public:
  enum class Family { Matern, SquaredExponential, Sobolev2, Spectral };

  /// Matern kernel with unit lengthscale, K(r) parameterized as in the usual
  /// sqrt(2 nu) r Bessel form. Half-integer nu uses the exact
  /// polynomial-times-exponential closed form; other nu use the Bessel form
  /// with a series expansion near r = 0.
  static KernelSpec matern(double nu, Interval domain = {0.0, 1.0});

  /// exp(-(x - x')^2); unit lengthscale, no tunable parameters.
  static KernelSpec squared_exponential(Interval domain = {0.0, 1.0});

  /// 1 + x x' + min^2 (3 max - min) / 6 on [0,1].
  static KernelSpec sobolev2();

  /// Truncated eigenexpansion sum_{i<=N} mu_i phi_i(x) phi_i(x').
  static KernelSpec spectral(BasisId basis, EigenSequence eigenvalues,
                             std::int64_t truncation = 2000);

  Family family() const;
  Interval domain() const;
  double matern_nu() const;           ///< throws unless Matern
  bool is_spectral() const;
  BasisId basis() const;              ///< throws unless Spectral
  const EigenSequence& eigenvalues() const;  ///< throws unless Spectral
  std::int64_t truncation() const;    ///< throws unless Spectral

  /// Largest derivative order k such that eval_deriv with jx, jx' <= k is
  /// supported (the C^{2k} requirement, enforced conservatively).
  int max_deriv_order() const;

  /// Upper bound on the truncation error sum_{i>N} mu_i C_phi^2 of a
  /// spectral kernel; zero for closed-form families.
  double spectral_tail_bound() const;

  std::string describe() const;

  struct Impl;
  std::shared_ptr<const Impl> impl;  // internal
};

/// K(x, x').
double eval(const KernelSpec& k, double x, double xp);

/// d^jx/dx^jx d^jxp/dx'^jxp K(x, x').
double eval_deriv(const KernelSpec& k, int jx, int jxp, double x, double xp);

/// Cross Gram matrix M[a][b] = eval_deriv(k, ja, jb, A[a], B[b]).
Matrix cross_gram(const KernelSpec& k, const Vector& a, const Vector& b, int ja, int jb);

/// Gram matrix over one design; symmetric (and PSD up to tolerance) when
/// jx == jxp.
Matrix gram(const KernelSpec& k, const Vector& x, int jx = 0, int jxp = 0);

/// Equivalent kernel: same basis and truncation, eigenvalues
/// nu_i = mu_i / (lambda + mu_i). Only spectral kernels carry the tracked
/// eigensystem this requires.
KernelSpec equivalent_kernel(const KernelSpec& k, double lambda);

}  // namespace gpderiv
