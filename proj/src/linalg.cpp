#include "gpderiv/linalg.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#ifdef GPDERIV_HAVE_LAPACK
extern "C" {
void dsyevd_(const char* jobz, const char* uplo, const int* n, double* a, const int* lda,
             double* w, double* work, const int* lwork, int* iwork, const int* liwork,
             int* info);
void openblas_set_num_threads(int);
}
#endif

namespace gpderiv {

SymEig sym_eig(const Matrix& a) {
  if (a.rows() != a.cols()) throw ContractError("sym_eig: matrix must be square");
#ifdef GPDERIV_HAVE_LAPACK
  // Parallelism lives in the replicate pool; BLAS stays single-threaded so
  // results do not depend on the worker count.
  static const bool threads_pinned = [] {
    openblas_set_num_threads(1);
    return true;
  }();
  (void)threads_pinned;
  const int n = static_cast<int>(a.rows());
  SymEig out;
  out.vectors = a;
  out.values.resize(n);
  int info = 0;
  int lwork = -1, liwork = -1;
  double wkopt = 0.0;
  int iwkopt = 0;
  dsyevd_("V", "L", &n, out.vectors.data(), &n, out.values.data(), &wkopt, &lwork, &iwkopt,
          &liwork, &info);
  lwork = static_cast<int>(wkopt);
  liwork = iwkopt;
  std::vector<double> work(static_cast<std::size_t>(lwork));
  std::vector<int> iwork(static_cast<std::size_t>(liwork));
  dsyevd_("V", "L", &n, out.vectors.data(), &n, out.values.data(), work.data(), &lwork,
          iwork.data(), &liwork, &info);
  if (info != 0) {
    std::ostringstream os;
    os << "dsyevd failed with info=" << info << " (n=" << n << ")";
    throw NumericalError(os.str());
  }
  return out;
#else
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  if (es.info() != Eigen::Success)
    throw NumericalError("symmetric eigensolver failed to converge");
  return SymEig{es.eigenvalues(), es.eigenvectors()};
#endif
}

JitteredChol jittered_llt(Matrix a, double rel_start, double rel_max) {
  if (a.rows() != a.cols()) throw ContractError("jittered_llt: matrix must be square");
  const double mean_diag = std::max(a.diagonal().mean(), 1e-300);
  JitteredChol out;
  out.llt.compute(a);
  if (out.llt.info() == Eigen::Success) return out;
  double jitter = rel_start * mean_diag;
  const double max_jitter = rel_max * mean_diag;
  double applied = 0.0;
  while (jitter <= max_jitter) {
    a.diagonal().array() += jitter - applied;
    applied = jitter;
    out.llt.compute(a);
    if (out.llt.info() == Eigen::Success) {
      out.jitter = jitter;
      return out;
    }
    jitter *= 2.0;
  }
  std::ostringstream os;
  os << "Cholesky failed after jitter escalation: n=" << a.rows()
     << ", mean diagonal=" << mean_diag << ", last jitter=" << applied;
  throw NumericalError(os.str());
}

}  // namespace gpderiv
