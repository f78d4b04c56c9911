#include "gpderiv/series.hpp"

#include <cmath>

namespace gpderiv {

double series_eval(const SeriesFunction& f, int k, double x) {
  if (k < 0) throw ContractError("series_eval: derivative order must be >= 0");
  double s = 0.0;
  for (Eigen::Index i = 0; i < f.coeffs.size(); ++i) {
    const double c = f.coeffs(i);
    if (c == 0.0) continue;
    s += c * basis_eval(f.basis, i + 1, k, x);
  }
  return s;
}

Vector series_eval_grid(const SeriesFunction& f, int k, const Vector& grid) {
  if (k < 0) throw ContractError("series_eval: derivative order must be >= 0");
  if (f.coeffs.size() == 0) return Vector::Zero(grid.size());
  const Matrix phi = basis_matrix(f.basis, k, grid, f.coeffs.size());
  return phi * f.coeffs;
}

SeriesFunction f_lambda(const SeriesFunction& f0, const EigenSequence& eig, double lambda) {
  if (lambda < 0.0) throw ContractError("f_lambda: lambda must be >= 0");
  SeriesFunction out;
  out.basis = f0.basis;
  out.coeffs = f0.coeffs;
  if (lambda == 0.0) return out;
  for (Eigen::Index i = 0; i < out.coeffs.size(); ++i) {
    const double mu = eig.mu(i + 1);
    out.coeffs(i) *= mu / (lambda + mu);
  }
  return out;
}

double space_norm(const SeriesFunction& f, const FunctionSpace& space) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < f.coeffs.size(); ++i) {
    const double a = std::abs(f.coeffs(i));
    if (a == 0.0) continue;
    const double idx = static_cast<double>(i + 1);
    if (space.kind == FunctionSpace::Kind::Holder)
      s += std::pow(idx, space.param) * a;
    else
      s += std::exp(space.param * idx) * a;
  }
  return s;
}

}  // namespace gpderiv
