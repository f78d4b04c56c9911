#include "gpderiv/posterior.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/QR>

namespace gpderiv {

namespace {

void check_dataset(const KernelSpec& kernel, const Dataset& data) {
  if (data.x.size() != data.y.size())
    throw ContractError("dataset: x and y must have equal lengths");
  if (data.x.size() < 1) throw ContractError("dataset: n must be >= 1");
  for (Eigen::Index i = 0; i < data.x.size(); ++i)
    if (!kernel.domain().contains(data.x(i)))
      throw DomainError("dataset: design point outside kernel domain");
}

}  // namespace

FittedGP::FittedGP(KernelSpec kernel, Dataset data, double lambda, double sigma2)
    : kernel_(std::move(kernel)), lambda_(lambda), sigma2_(sigma2) {
  if (!(lambda > 0.0)) throw ContractError("fit: lambda must be positive");
  if (!(sigma2 > 0.0)) throw ContractError("fit: sigma2 must be positive");
  check_dataset(kernel_, data);
  x_ = std::move(data.x);
  y_ = std::move(data.y);
  const Eigen::Index n = x_.size();
  Matrix a = gram(kernel_, x_, 0, 0);
  a.diagonal().array() += static_cast<double>(n) * lambda_;
  chol_ = jittered_llt(std::move(a));
  weights_ = chol_.llt.solve(y_);
}

FittedGP fit(const KernelSpec& kernel, const Dataset& data, double lambda, double sigma2) {
  return FittedGP(kernel, data, lambda, sigma2);
}

Vector FittedGP::solve(const Vector& b) const { return chol_.llt.solve(b); }
Matrix FittedGP::solve(const Matrix& b) const { return chol_.llt.solve(b); }

double FittedGP::posterior_mean(int k, double x) const {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x_.size(); ++i)
    s += eval_deriv(kernel_, k, 0, x, x_(i)) * weights_(i);
  return s;
}

Vector FittedGP::posterior_mean_grid(int k, const Vector& grid) const {
  return cross_gram(kernel_, grid, x_, k, 0) * weights_;
}

double FittedGP::posterior_cov(int k, double x, double xp) const {
  const Eigen::Index n = x_.size();
  Vector vx(n), vxp(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    vx(i) = eval_deriv(kernel_, k, 0, x, x_(i));
    vxp(i) = eval_deriv(kernel_, k, 0, xp, x_(i));
  }
  const double kk = eval_deriv(kernel_, k, k, x, xp);
  const double q = vx.dot(chol_.llt.solve(vxp));
  return sigma2_ / (static_cast<double>(n) * lambda_) * (kk - q);
}

Matrix FittedGP::posterior_cov_grid(int k, const Vector& grid) const {
  const Eigen::Index n = x_.size();
  const Matrix v = cross_gram(kernel_, grid, x_, k, 0);
  // K_kk(grid, grid) - W^T W with W = L^{-1} V^T keeps the result symmetric
  Matrix w = factor_lower().triangularView<Eigen::Lower>().solve(Matrix(v.transpose()));
  Matrix c = gram(kernel_, grid, k, k) - w.transpose() * w;
  c = 0.5 * (c + c.transpose());
  return sigma2_ / (static_cast<double>(n) * lambda_) * c;
}

double krr_check(const KernelSpec& kernel, const Dataset& data, double lambda,
                 const Vector& grid) {
  check_dataset(kernel, data);
  if (!(lambda > 0.0)) throw ContractError("krr_check: lambda must be positive");
  const Eigen::Index n = data.x.size();

  const FittedGP posterior = fit(kernel, data, lambda, 1.0);
  const Vector mean = posterior.posterior_mean_grid(0, grid);

  // Independent route: reassemble the system from scratch and solve the
  // stationarity equations of the ridge objective with a pivoted QR.
  Matrix a = gram(kernel, data.x, 0, 0);
  a.diagonal().array() += static_cast<double>(n) * lambda;
  const Vector beta = Eigen::ColPivHouseholderQR<Matrix>(a).solve(data.y);
  const Vector krr = cross_gram(kernel, grid, data.x, 0, 0) * beta;

  return (krr - mean).cwiseAbs().maxCoeff();
}

double variance_bias_discrepancy(const KernelSpec& kernel, const Dataset& data,
                                 double lambda, const Vector& grid) {
  check_dataset(kernel, data);
  const Eigen::Index n = data.x.size();
  const FittedGP posterior = fit(kernel, data, lambda, 1.0);

  // Path 1: rescaled posterior covariance on the grid.
  const Matrix lhs = static_cast<double>(n) * lambda / posterior.sigma2() *
                     posterior.posterior_cov_grid(0, grid);

  // Path 2: noise-free ridge regression of K(., x') for every grid x',
  // solved from a fresh assembly with a different factorization.
  Matrix a = gram(kernel, data.x, 0, 0);
  const Matrix targets = cross_gram(kernel, data.x, grid, 0, 0);  // n x g
  a.diagonal().array() += static_cast<double>(n) * lambda;
  const Matrix beta = Eigen::ColPivHouseholderQR<Matrix>(a).solve(targets);
  const Matrix fitted = cross_gram(kernel, grid, data.x, 0, 0) * beta;
  const Matrix rhs = gram(kernel, grid, 0, 0) - fitted;

  return (lhs - rhs).cwiseAbs().maxCoeff();
}

Matrix sample_paths(const FittedGP& fit, int k, const Vector& grid, int m, Rng& rng) {
  if (m < 1) throw ContractError("sample_paths: m must be >= 1");
  const Vector mean = fit.posterior_mean_grid(k, grid);
  Matrix cov = fit.posterior_cov_grid(k, grid);
  const Eigen::Index g = grid.size();
  const double scale = cov.diagonal().maxCoeff();
  if (!(scale > 0.0)) {
    // degenerate posterior (e.g. enormous lambda): every draw is the mean
    Matrix draws(m, g);
    draws.rowwise() = mean.transpose();
    return draws;
  }
  // the grid covariance is PSD up to rounding; nudge relative to its scale
  // before factorizing, then let jitter escalation handle the rest
  cov.diagonal().array() += scale * 1e-14;
  const JitteredChol chol = jittered_llt(std::move(cov), 1e-10, 1e-2);
  const Matrix l = chol.llt.matrixL();

  Matrix draws(m, g);
  Vector z(g);
  for (int r = 0; r < m; ++r) {
    for (Eigen::Index i = 0; i < g; ++i) z(i) = rng.next_normal();
    draws.row(r) = (mean + l * z).transpose();
  }
  return draws;
}

CredibleBand credible_band(const FittedGP& fit, int k, const Vector& grid, double level,
                           int m, Rng& rng) {
  if (!(level > 0.0 && level < 1.0)) throw ContractError("credible_band: level in (0,1)");
  if (m < 100) throw ContractError("credible_band: m must be >= 100");
  CredibleBand band;
  band.center = fit.posterior_mean_grid(k, grid);
  const Matrix draws = sample_paths(fit, k, grid, m, rng);
  std::vector<double> devs(static_cast<std::size_t>(m));
  for (int r = 0; r < m; ++r)
    devs[static_cast<std::size_t>(r)] =
        (draws.row(r).transpose() - band.center).cwiseAbs().maxCoeff();
  std::sort(devs.begin(), devs.end());
  const double t = level * static_cast<double>(m);
  if (t < 1.0) {
    band.radius = t * devs.front();  // interpolate toward the zero anchor
  } else {
    band.radius = devs[static_cast<std::size_t>(std::ceil(t)) - 1];
  }
  return band;
}

}  // namespace gpderiv
