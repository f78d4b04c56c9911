#pragma once

#include <string>
#include <vector>

#include "gpderiv/common.hpp"

namespace gpderiv {

/// Orthonormal bases of L2[0,1] used by spectral kernels and series
/// functions. Both have eigenfunctions uniformly bounded by sqrt(2).
enum class BasisId {
  /// psi_1 = 1, psi_2i = sqrt(2) cos(2 pi i x), psi_2i+1 = sqrt(2) sin(2 pi i x).
  FourierL2,
  /// phi_i = sqrt(2) cos((i - 1/2) pi x).
  CosineHalf,
};

std::string basis_name(BasisId b);
BasisId parse_basis(const std::string& name);

/// Uniform bound on |phi_i| shared by both bases.
inline constexpr double kBasisSupBound = 1.4142135623730951;

/// Angular frequency of basis function i (1-based).
double basis_freq(BasisId b, std::int64_t i);

/// k-th derivative of basis function i at x.
double basis_eval(BasisId b, std::int64_t i, int k, double x);

/// sup_x |phi_i^(k)(x)|; used for analytic tail and sup bounds.
double basis_amp(BasisId b, std::int64_t i, int k);

/// Dense matrix [phi_j^(k)(x_i)]_{i,j}, i over points, j = 1..n_funcs.
/// Uses rotation recurrences with periodic re-anchoring, so cost is O(n_points
/// * n_funcs) with two multiply-adds per entry.
Matrix basis_matrix(BasisId b, int k, const Vector& points, std::int64_t n_funcs);

}  // namespace gpderiv
