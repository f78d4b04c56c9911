#include "gpderiv/selection.hpp"

#include <cmath>
#include <sstream>

#include "gpderiv/linalg.hpp"

namespace gpderiv {

namespace {

constexpr double kLog2Pi = 1.83787706640934548356065947281123527;

void check_inputs(const KernelSpec& kernel, const Dataset& data) {
  if (data.x.size() != data.y.size())
    throw ContractError("dataset: x and y must have equal lengths");
  if (data.x.size() < 1) throw ContractError("dataset: n must be >= 1");
  for (Eigen::Index i = 0; i < data.x.size(); ++i)
    if (!kernel.domain().contains(data.x(i)))
      throw DomainError("dataset: design point outside kernel domain");
}

// Profile score at lambda given the eigendecomposition of K(X,X):
// -0.5 [ n log sigma_hat^2 + sum log(1 + u_i/(n lambda)) + n (1 + log 2 pi) ].
struct ProfilePoint {
  double sigma2 = 0.0;
  double score = 0.0;
  bool ok = false;
};

ProfilePoint profile_at(const Vector& u, const Vector& z, double lambda) {
  const double n = static_cast<double>(u.size());
  const double nl = n * lambda;
  double logdet = 0.0, quad = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double ui = std::max(u(i), 0.0);  // clamp eigensolver noise
    logdet += std::log1p(ui / nl);
    quad += z(i) * z(i) / (ui + nl);
  }
  ProfilePoint p;
  p.sigma2 = lambda * quad;
  if (!(p.sigma2 > 0.0) || !std::isfinite(logdet)) return p;
  p.score = -0.5 * (n * std::log(p.sigma2) + logdet + n * (1.0 + kLog2Pi));
  p.ok = std::isfinite(p.score);
  return p;
}

}  // namespace

std::vector<double> default_lambda_grid() { return logspace(1e-8, 1.0, 30); }

double log_marginal_likelihood(const KernelSpec& kernel, const Dataset& data, double lambda,
                               double sigma2) {
  check_inputs(kernel, data);
  if (!(lambda > 0.0) || !(sigma2 > 0.0))
    throw ContractError("log_marginal_likelihood: lambda and sigma2 must be positive");
  const Eigen::Index n = data.x.size();
  Matrix m = gram(kernel, data.x, 0, 0) / (static_cast<double>(n) * lambda);
  m.diagonal().array() += 1.0;
  const JitteredChol chol = jittered_llt(std::move(m));
  const double logdet =
      2.0 * Matrix(chol.llt.matrixL()).diagonal().array().log().sum();
  const double quad = data.y.dot(chol.llt.solve(data.y)) / sigma2;
  return -0.5 * (quad + logdet +
                 static_cast<double>(n) * (std::log(sigma2) + kLog2Pi));
}

double mmle_sigma2(const KernelSpec& kernel, const Dataset& data, double lambda) {
  check_inputs(kernel, data);
  if (!(lambda > 0.0)) throw ContractError("mmle_sigma2: lambda must be positive");
  const Eigen::Index n = data.x.size();
  Matrix a = gram(kernel, data.x, 0, 0);
  a.diagonal().array() += static_cast<double>(n) * lambda;
  const JitteredChol chol = jittered_llt(std::move(a));
  return lambda * data.y.dot(chol.llt.solve(data.y));
}

SelectionResult select_lambda(const KernelSpec& kernel, const Dataset& data,
                              const std::vector<double>& lambda_grid) {
  check_inputs(kernel, data);
  if (lambda_grid.empty()) throw ContractError("select_lambda: empty grid");
  std::vector<double> grid = lambda_grid;
  std::sort(grid.begin(), grid.end());

  const SymEig eig = sym_eig(gram(kernel, data.x, 0, 0));
  const Vector z = eig.vectors.transpose() * data.y;

  SelectionResult result;
  bool found = false;
  double best = -std::numeric_limits<double>::infinity();
  for (double lambda : grid) {
    if (!(lambda > 0.0)) throw ContractError("select_lambda: lambda grid must be positive");
    const ProfilePoint p = profile_at(eig.values, z, lambda);
    if (!p.ok) {
      std::ostringstream os;
      os << "candidate lambda=" << lambda << " produced a non-finite profile score";
      result.warnings.push_back(os.str());
      continue;
    }
    result.trace.push_back({std::numeric_limits<double>::quiet_NaN(), lambda, p.score});
    if (!found || p.score > best) {  // strict: ties keep the smaller lambda
      found = true;
      best = p.score;
      result.lambda = lambda;
      result.sigma2 = p.sigma2;
    }
  }
  if (!found) throw SelectionError("select_lambda: every candidate failed numerically");
  return result;
}

SelectionResult loocv_select(const Dataset& data, const std::vector<double>& nu_candidates,
                             const std::vector<double>& lambda_grid) {
  if (nu_candidates.empty() || lambda_grid.empty())
    throw ContractError("loocv_select: candidate sets must be nonempty");
  if (data.x.size() != data.y.size() || data.x.size() < 2)
    throw ContractError("loocv_select: need n >= 2 with equal lengths");
  std::vector<double> grid = lambda_grid;
  std::sort(grid.begin(), grid.end());

  const Eigen::Index n = data.x.size();
  const double nd = static_cast<double>(n);

  SelectionResult result;
  bool found = false;
  double best_err = std::numeric_limits<double>::infinity();
  for (double nu : nu_candidates) {
    const KernelSpec kernel = KernelSpec::matern(nu);
    check_inputs(kernel, data);
    const SymEig eig = sym_eig(gram(kernel, data.x, 0, 0));
    const Vector u = eig.values.cwiseMax(0.0);
    const Vector z = eig.vectors.transpose() * data.y;
    const Matrix q2 = eig.vectors.array().square();  // Q_ij^2
    for (double lambda : grid) {
      if (!(lambda > 0.0)) throw ContractError("loocv_select: lambda grid must be positive");
      const Vector shrink = u.array() / (u.array() + nd * lambda);
      const Vector hdiag = q2 * shrink;
      if ((hdiag.array() >= 1.0 - 1e-12).any()) {
        std::ostringstream os;
        os << "skipping nu=" << nu << ", lambda=" << lambda
           << ": leverage H_ii numerically >= 1";
        result.warnings.push_back(os.str());
        continue;
      }
      const Vector fhat = eig.vectors * shrink.cwiseProduct(z).matrix();
      const Vector resid =
          (data.y - fhat).array() / (1.0 - hdiag.array());
      const double err = resid.squaredNorm() / nd;
      result.trace.push_back({nu, lambda, -err});
      if (!found || err < best_err) {
        found = true;
        best_err = err;
        result.lambda = lambda;
        result.nu = nu;
      }
    }
  }
  if (!found) throw SelectionError("loocv_select: every candidate was skipped");
  result.sigma2 = mmle_sigma2(KernelSpec::matern(*result.nu), data, result.lambda);
  return result;
}

}  // namespace gpderiv
