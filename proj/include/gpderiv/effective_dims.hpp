#pragma once

#include <map>
#include <set>

#include "gpderiv/basis.hpp"
#include "gpderiv/common.hpp"
#include "gpderiv/eigenseq.hpp"
#include "gpderiv/series.hpp"

namespace gpderiv {

/// Effective-dimension diagnostics of a spectral kernel at a given lambda.
///
/// kappa_tilde_kk_sq[k] is the grid sup of sum_i nu_i phi_i^(k)(x)^2 with
/// nu_i = mu_i/(lambda + mu_i); kappa_tilde_kk_bound[k] is the analytic upper
/// bound sum_i nu_i sup|phi_i^(k)|^2, which the grid estimate never exceeds.
/// kappa_hat_k1_sq[k] is sum_i i^{2k+2} nu_i (the high-order hat quantity).
struct EffectiveDims {
  double lambda = 0.0;
  double kappa_tilde_sq = 0.0;        // k = 0 sup
  double kappa_tilde_sq_bound = 0.0;  // k = 0 analytic bound
  double kappa_hat_01_sq = 0.0;       // sum i nu_i
  bool hat01_diverged = false;

  std::map<int, double> kappa_tilde_kk_sq;
  std::map<int, double> kappa_tilde_kk_bound;
  std::map<int, bool> kappa_tilde_diverged;
  std::map<int, double> kappa_hat_k1_sq;  // keyed by k; value is kappa_hat_{k+1,k+1}^2
  std::map<int, bool> kappa_hat_diverged;

  std::int64_t truncation = 0;  // terms actually summed
  double tail_bound = 0.0;      // largest relative tail bound across computed sums
};

struct EffectiveDimsOptions {
  int grid_size = 1001;              // sup grid; endpoints are always included
  double tail_rel_target = 1e-6;     // stop extending once the tail is this small
  std::int64_t max_terms = 1000000;  // hard truncation cap
  std::int64_t sup_max_terms = 50000;  // cap for the O(grid x N) sup scans
};

/// Diagnostics at `lambda` for the requested derivative orders (k = 0 is
/// always included). Divergent configurations (non-summable tails) raise the
/// per-order flags rather than silently truncating; slowly converging sups
/// that hit the term cap report their tail bound instead.
EffectiveDims effective_dims(const EigenSequence& eig, BasisId basis, double lambda,
                             const std::set<int>& orders,
                             const EffectiveDimsOptions& opts = {});

/// C(n, kappa_tilde) = (kt^2 sqrt(20 log n)/sqrt(n)) (4 + 4 kt sqrt(20 log n)/(3 sqrt n)).
/// Checked against 1/2 before the noise-free bounds apply.
double bound_constant(int n, double kappa_tilde);

/// Regularization and error-rate schedule for a smoothness class.
struct RateSchedule {
  double lambda_n = 0.0;
  double eps_n = 0.0;
  /// False when the requested derivative order is outside the regime the
  /// schedule guarantees (Holder with k >= alpha - 3/2).
  bool derivative_guarantee = true;
};

/// Holder(alpha): lambda_n = (log n/n)^{2a/(2a+1)}, eps_n = (log n/n)^{(a-k)/(2a+1)}.
/// Analytic(gamma): lambda_n = 1/n, eps_n = log n / sqrt(n); requires k = 0.
/// Exact expressions with constant 1.
RateSchedule rate_schedule(const FunctionSpace& space, int k, int n);

}  // namespace gpderiv
