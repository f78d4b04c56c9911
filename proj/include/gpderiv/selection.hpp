#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gpderiv/common.hpp"
#include "gpderiv/kernel.hpp"
#include "gpderiv/posterior.hpp"

namespace gpderiv {

/// One scored candidate of a hyperparameter sweep. `nu` is NaN when the sweep
/// is over lambda alone. Scores are oriented so that larger is better (log
/// marginal likelihood for empirical Bayes, negated mean squared LOO residual
/// for cross-validation).
struct ScoreEntry {
  double nu = std::numeric_limits<double>::quiet_NaN();
  double lambda = 0.0;
  double score = 0.0;
};

struct SelectionResult {
  double lambda = 0.0;
  double sigma2 = 0.0;
  std::optional<double> nu;
  std::vector<ScoreEntry> trace;
  std::vector<std::string> warnings;
};

/// Exact Gaussian log density of Y under Y | X ~ N(0, sigma^2 [(n lambda)^{-1}
/// K(X,X) + I]), via one factorization of (n lambda)^{-1} K + I.
double log_marginal_likelihood(const KernelSpec& kernel, const Dataset& data, double lambda,
                               double sigma2);

/// Marginal maximum likelihood estimate of the noise variance at fixed lambda:
/// sigma_hat^2 = lambda Y^T (K + n lambda I)^{-1} Y.
double mmle_sigma2(const KernelSpec& kernel, const Dataset& data, double lambda);

/// Profile empirical Bayes over a lambda grid: sigma^2 is plugged in by its
/// closed form per candidate and the profile log marginal likelihood is
/// maximized. Ties break toward the smaller lambda. One eigendecomposition of
/// K(X,X) serves every candidate.
SelectionResult select_lambda(const KernelSpec& kernel, const Dataset& data,
                              const std::vector<double>& lambda_grid);

/// Joint Matern smoothness and lambda selection by exact leave-one-out squared
/// error, using the linear-smoother shortcut
/// r_i = (y_i - f_hat(x_i)) / (1 - H_ii), H = K (K + n lambda I)^{-1}.
/// Candidates with H_ii numerically >= 1 are skipped with a warning.
SelectionResult loocv_select(const Dataset& data, const std::vector<double>& nu_candidates,
                             const std::vector<double>& lambda_grid);

/// Default search grid: 30 log-spaced points in [1e-8, 1].
std::vector<double> default_lambda_grid();

}  // namespace gpderiv
