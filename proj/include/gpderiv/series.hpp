#pragma once

#include "gpderiv/basis.hpp"
#include "gpderiv/common.hpp"
#include "gpderiv/eigenseq.hpp"

namespace gpderiv {

/// A function represented by coefficients on one of the orthonormal bases:
/// f = sum_i coeffs[i-1] phi_i.
struct SeriesFunction {
  BasisId basis = BasisId::FourierL2;
  Vector coeffs;
};

/// Function classes with coefficient-weighted norms.
struct FunctionSpace {
  enum class Kind { Holder, Analytic };
  Kind kind = Kind::Holder;
  double param = 1.0;  // alpha or gamma

  static FunctionSpace holder(double alpha) { return {Kind::Holder, alpha}; }
  static FunctionSpace analytic(double gamma) { return {Kind::Analytic, gamma}; }
};

/// f^(k)(x) = sum_i f_i phi_i^(k)(x).
double series_eval(const SeriesFunction& f, int k, double x);

/// f^(k) on many points at once.
Vector series_eval_grid(const SeriesFunction& f, int k, const Vector& grid);

/// Population-level regularized approximation: coefficient i becomes
/// f_i mu_i / (lambda + mu_i). Realizes (L_K + lambda I)^{-1} L_K f and the
/// action of the equivalent-kernel integral operator.
SeriesFunction f_lambda(const SeriesFunction& f0, const EigenSequence& eig, double lambda);

/// Holder: sum_i i^alpha |f_i|.  Analytic: sum_i e^{gamma i} |f_i|.
/// Finite sums over the stored coefficients.
double space_norm(const SeriesFunction& f, const FunctionSpace& space);

}  // namespace gpderiv
