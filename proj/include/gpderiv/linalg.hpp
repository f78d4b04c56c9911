#pragma once

#include <Eigen/Cholesky>

#include "gpderiv/common.hpp"

namespace gpderiv {

/// Eigendecomposition of a symmetric matrix, eigenvalues ascending.
struct SymEig {
  Vector values;
  Matrix vectors;  // columns
};

/// Symmetric eigensolve; uses LAPACK dsyevd when the build links a BLAS/LAPACK
/// provider, otherwise Eigen's solver. Deterministic for a fixed build.
SymEig sym_eig(const Matrix& a);

/// Cholesky with jitter escalation: start at `rel_start * mean(diag)` only
/// after the plain factorization fails, doubling until `rel_max * mean(diag)`.
struct JitteredChol {
  Eigen::LLT<Matrix> llt;
  double jitter = 0.0;
};

JitteredChol jittered_llt(Matrix a, double rel_start = 1e-10, double rel_max = 1e-4);

}  // namespace gpderiv
