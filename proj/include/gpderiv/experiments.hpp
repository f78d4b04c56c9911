#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gpderiv/common.hpp"
#include "gpderiv/effective_dims.hpp"
#include "gpderiv/posterior.hpp"
#include "gpderiv/rng.hpp"
#include "gpderiv/series.hpp"

namespace gpderiv {

/// The simulation truth: f0(x) = sqrt(2) sum_{i<=2000} i^-4 sin(i)
/// cos((i - 1/2) pi x), evaluated through its series representation.
const SeriesFunction& simulation_truth();

/// f0^(k)(x).
double true_target(int k, double x);

/// X_i ~ Unif[0,1], Y_i = f0(X_i) + eps_i, eps_i ~ N(0, sigma0_sq).
Dataset simulate_dataset(int n, double sigma0_sq, Rng& rng);

/// Root mean squared pointwise difference.
double rmse(const Vector& estimate, const Vector& truth);

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

// ---------------------------------------------------------------------------
// Replicated RMSE study (kernel menu, empirical Bayes / LOOCV tuning)
// ---------------------------------------------------------------------------

struct MethodSpec {
  enum class Kind { MaternOracle, MaternLoocv, SquaredExp, Sobolev };
  Kind kind = Kind::SquaredExp;
  double oracle_nu = 2.5;

  std::string name() const;
  static MethodSpec parse(const std::string& name);
};

struct StudyConfig {
  std::vector<int> n_values;
  int replications = 1;
  double sigma0_sq = 0.1;
  std::vector<MethodSpec> methods;
  int grid_points = 100;  // evaluation grid t/(grid_points-1)
  std::uint64_t seed = 0;
  std::vector<int> derivative_orders = {0, 1};
  std::vector<double> lambda_grid;           // empty -> default grid
  std::vector<double> nu_candidates = {2.0, 2.5, 3.0, 3.5, 4.0};
  int threads = 0;
};

struct StudyCell {
  std::string method;
  int n = 0;
  int order = 0;
  double mean_rmse = 0.0;
  double median_rmse = 0.0;
  double se = 0.0;  // sample sd / sqrt(reps)
  int reps = 0;
  int failures = 0;
};

struct RepRecord {
  std::string method;
  int n = 0;
  int rep = 0;
  std::uint64_t stream_index = 0;
  bool failed = false;
  double lambda = 0.0;
  double sigma2 = 0.0;
  double nu = std::numeric_limits<double>::quiet_NaN();
  std::map<int, double> rmse_by_order;
};

struct StudyResult {
  std::vector<StudyCell> cells;
  std::vector<RepRecord> records;
  std::uint64_t master_seed = 0;
  std::string splitting_rule;
};

/// Per replicate: simulate, tune each method (EB for the kernel menu, LOOCV
/// for the Matern smoothness), fit, evaluate the posterior mean and its
/// derivative on the t/(grid_points-1) grid, record RMSEs; aggregate
/// mean/median/se.
/// Replicates run in parallel with per-replicate seed streams and
/// order-independent aggregation. Failures beyond 5% fail the study.
StudyResult replicate_study(const StudyConfig& config);

// ---------------------------------------------------------------------------
// Rate verification with oracle regularization
// ---------------------------------------------------------------------------

struct RateStudyConfig {
  FunctionSpace space = FunctionSpace::holder(2.0);
  std::vector<int> orders = {0};
  std::vector<int> n_values;
  int replications = 1;
  double sigma0_sq = 0.1;
  double kernel_scale = 10.0;
  std::int64_t truncation = 2000;
  int grid_points = 100;
  std::uint64_t seed = 0;
  int threads = 0;
};

struct RateCurve {
  int order = 0;
  double slope = 0.0;
  double theory_slope = 0.0;
  std::vector<std::pair<int, double>> medians;   // (n, median RMSE)
  std::vector<std::pair<int, double>> lambdas;   // (n, lambda_n)
};

struct RateStudyResult {
  std::vector<RateCurve> curves;
  std::uint64_t master_seed = 0;
};

/// Oracle-tuned rates: a spectral kernel matching the class (polynomial decay
/// with the class alpha; exponential decay with the class gamma), lambda from
/// rate_schedule, no data-driven selection anywhere. Returns per-order
/// least-squares slopes of log(median RMSE) against log(n / log n) for the
/// Holder class and log(sqrt(n) / log n) for the analytic class.
RateStudyResult rate_study(const RateStudyConfig& config);

/// Synthetic truth used by rate_study: coefficients i^{-(alpha+1)} for
/// Holder(alpha), e^{-1.2 gamma i} for Analytic(gamma), on the Fourier basis.
SeriesFunction rate_truth(const FunctionSpace& space, std::int64_t n_coeffs);

// ---------------------------------------------------------------------------
// Posterior contraction probe
// ---------------------------------------------------------------------------

enum class ProbeNorm { L2, Linf };

/// Monte Carlo posterior mass outside the `radius` ball around the truth:
/// Pi(||f^(k) - truth||_norm > radius | data), estimated from m sampled
/// paths; the L2 norm is approximated by grid quadrature.
double contraction_probe(const FittedGP& fit, int k, const Vector& grid,
                         const Vector& truth_on_grid, ProbeNorm norm, double radius, int m,
                         Rng& rng);

}  // namespace gpderiv
