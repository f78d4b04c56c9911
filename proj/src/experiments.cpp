#include "gpderiv/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "gpderiv/parallel.hpp"
#include "gpderiv/selection.hpp"

namespace gpderiv {

namespace {

constexpr std::int64_t kTruthTerms = 2000;

double median_of(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Vector eval_grid(int grid_points) {
  Vector g(grid_points);
  for (int t = 0; t < grid_points; ++t)
    g(t) = static_cast<double>(t) / static_cast<double>(grid_points - 1);
  return g;
}

}  // namespace

const SeriesFunction& simulation_truth() {
  static const SeriesFunction f0 = [] {
    SeriesFunction f;
    f.basis = BasisId::CosineHalf;
    f.coeffs.resize(kTruthTerms);
    for (std::int64_t i = 1; i <= kTruthTerms; ++i) {
      const double id = static_cast<double>(i);
      f.coeffs(i - 1) = std::sin(id) / (id * id * id * id);
    }
    return f;
  }();
  return f0;
}

double true_target(int k, double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("true_target: x must lie in [0,1]");
  return series_eval(simulation_truth(), k, x);
}

Dataset simulate_dataset(int n, double sigma0_sq, Rng& rng) {
  if (n < 1) throw ContractError("simulate_dataset: n must be >= 1");
  if (!(sigma0_sq > 0.0)) throw ContractError("simulate_dataset: sigma0_sq must be positive");
  Dataset d;
  d.x.resize(n);
  d.y.resize(n);
  const double sd = std::sqrt(sigma0_sq);
  for (int i = 0; i < n; ++i) d.x(i) = rng.next_uniform();
  const Vector f = series_eval_grid(simulation_truth(), 0, d.x);
  for (int i = 0; i < n; ++i) d.y(i) = f(i) + sd * rng.next_normal();
  return d;
}

double rmse(const Vector& estimate, const Vector& truth) {
  if (estimate.size() != truth.size()) throw ContractError("rmse: length mismatch");
  if (estimate.size() == 0) throw ContractError("rmse: empty vectors");
  return std::sqrt((estimate - truth).squaredNorm() / static_cast<double>(estimate.size()));
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ContractError("fit_slope: need >= 2 points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw ContractError("fit_slope: degenerate abscissa");
  return sxy / sxx;
}

std::string MethodSpec::name() const {
  switch (kind) {
    case Kind::MaternOracle: return "matern_oracle";
    case Kind::MaternLoocv: return "matern_loocv";
    case Kind::SquaredExp: return "se";
    case Kind::Sobolev: return "sobolev";
  }
  return "?";
}

MethodSpec MethodSpec::parse(const std::string& name) {
  if (name == "matern_oracle") return {Kind::MaternOracle, 2.5};
  if (name == "matern_loocv") return {Kind::MaternLoocv, 2.5};
  if (name == "se") return {Kind::SquaredExp, 2.5};
  if (name == "sobolev") return {Kind::Sobolev, 2.5};
  throw ConfigError("unknown method name: " + name +
                    " (expected matern_oracle | matern_loocv | se | sobolev)");
}

StudyResult replicate_study(const StudyConfig& config) {
  if (config.replications < 1) throw ContractError("replicate_study: replications >= 1");
  if (config.n_values.empty()) throw ContractError("replicate_study: n_values empty");
  if (config.methods.empty()) throw ContractError("replicate_study: methods empty");
  if (config.grid_points < 2) throw ContractError("replicate_study: grid_points >= 2");
  const std::vector<double> lambda_grid =
      config.lambda_grid.empty() ? default_lambda_grid() : config.lambda_grid;

  const Vector grid = eval_grid(config.grid_points);
  std::map<int, Vector> truth;
  for (int k : config.derivative_orders)
    truth[k] = series_eval_grid(simulation_truth(), k, grid);

  StudyResult result;
  result.master_seed = config.seed;
  result.splitting_rule =
      "stream = xoshiro256++(master ^ 0x9E3779B97F4A7C15 * (n_index * replications + rep + 1))";

  for (std::size_t ni = 0; ni < config.n_values.size(); ++ni) {
    const int n = config.n_values[ni];
    const int reps = config.replications;
    std::vector<std::vector<RepRecord>> rep_records(static_cast<std::size_t>(reps));

    parallel_for(static_cast<std::size_t>(reps), config.threads, [&](std::size_t r) {
      const std::uint64_t stream_index =
          static_cast<std::uint64_t>(ni) * static_cast<std::uint64_t>(reps) + r;
      Rng rng = Rng::stream(config.seed, stream_index);
      const Dataset data = simulate_dataset(n, config.sigma0_sq, rng);
      auto& out = rep_records[r];
      for (const MethodSpec& method : config.methods) {
        RepRecord rec;
        rec.method = method.name();
        rec.n = n;
        rec.rep = static_cast<int>(r);
        rec.stream_index = stream_index;
        try {
          KernelSpec kernel = KernelSpec::sobolev2();
          double lambda = 0.0, sigma2 = 0.0;
          if (method.kind == MethodSpec::Kind::MaternLoocv) {
            const SelectionResult sel = loocv_select(data, config.nu_candidates, lambda_grid);
            kernel = KernelSpec::matern(*sel.nu);
            lambda = sel.lambda;
            sigma2 = sel.sigma2;
            rec.nu = *sel.nu;
          } else {
            switch (method.kind) {
              case MethodSpec::Kind::MaternOracle:
                kernel = KernelSpec::matern(method.oracle_nu);
                rec.nu = method.oracle_nu;
                break;
              case MethodSpec::Kind::SquaredExp:
                kernel = KernelSpec::squared_exponential();
                break;
              default:
                break;  // sobolev already set
            }
            const SelectionResult sel = select_lambda(kernel, data, lambda_grid);
            lambda = sel.lambda;
            sigma2 = sel.sigma2;
          }
          if (!(sigma2 > 0.0)) sigma2 = 1.0;  // rmse does not involve sigma2
          const FittedGP gp = fit(kernel, data, lambda, sigma2);
          rec.lambda = lambda;
          rec.sigma2 = sigma2;
          for (int k : config.derivative_orders)
            rec.rmse_by_order[k] = rmse(gp.posterior_mean_grid(k, grid), truth.at(k));
        } catch (const Error&) {
          rec.failed = true;
        }
        out.push_back(std::move(rec));
      }
    });

    for (const MethodSpec& method : config.methods) {
      std::map<int, std::vector<double>> values;
      int failures = 0;
      for (const auto& recs : rep_records)
        for (const auto& rec : recs) {
          if (rec.method != method.name()) continue;
          if (rec.failed) {
            ++failures;
            continue;
          }
          for (const auto& [k, v] : rec.rmse_by_order) values[k].push_back(v);
        }
      if (failures * 20 > reps) {
        std::ostringstream os;
        os << "study failed: method " << method.name() << " at n=" << n << " had "
           << failures << "/" << reps << " numerical failures (> 5%)";
        throw NumericalError(os.str());
      }
      for (int k : config.derivative_orders) {
        const auto& v = values[k];
        StudyCell cell;
        cell.method = method.name();
        cell.n = n;
        cell.order = k;
        cell.reps = static_cast<int>(v.size());
        cell.failures = failures;
        if (!v.empty()) {
          const double mean = std::accumulate(v.begin(), v.end(), 0.0) /
                              static_cast<double>(v.size());
          cell.mean_rmse = mean;
          cell.median_rmse = median_of(v);
          double ss = 0.0;
          for (double t : v) ss += (t - mean) * (t - mean);
          cell.se = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) /
                                       std::sqrt(static_cast<double>(v.size()))
                                 : 0.0;
        }
        result.cells.push_back(std::move(cell));
      }
    }
    for (auto& recs : rep_records)
      for (auto& rec : recs) result.records.push_back(std::move(rec));
  }
  return result;
}

SeriesFunction rate_truth(const FunctionSpace& space, std::int64_t n_coeffs) {
  SeriesFunction f;
  f.basis = BasisId::FourierL2;
  f.coeffs.resize(n_coeffs);
  for (std::int64_t i = 1; i <= n_coeffs; ++i) {
    const double id = static_cast<double>(i);
    f.coeffs(i - 1) = space.kind == FunctionSpace::Kind::Holder
                          ? std::pow(id, -(space.param + 1.0))
                          : std::exp(-1.2 * space.param * id);
  }
  return f;
}

RateStudyResult rate_study(const RateStudyConfig& config) {
  if (config.n_values.size() < 2) throw ContractError("rate_study: need >= 2 sample sizes");
  if (config.replications < 1) throw ContractError("rate_study: replications >= 1");
  const bool holder = config.space.kind == FunctionSpace::Kind::Holder;
  for (int k : config.orders) {
    (void)rate_schedule(config.space, k, config.n_values.front());  // validates k/class
  }

  const EigenSequence eig =
      holder ? EigenSequence::polynomial(config.space.param, config.kernel_scale)
             : EigenSequence::exponential(config.space.param, config.kernel_scale);
  const KernelSpec kernel = KernelSpec::spectral(BasisId::FourierL2, eig, config.truncation);
  const SeriesFunction truth = rate_truth(config.space, config.truncation);

  const Vector grid = eval_grid(config.grid_points);
  std::map<int, Vector> truth_grid;
  for (int k : config.orders) truth_grid[k] = series_eval_grid(truth, k, grid);
  const double sd = std::sqrt(config.sigma0_sq);

  RateStudyResult result;
  result.master_seed = config.seed;

  std::map<int, std::vector<double>> medians_by_order;
  std::map<int, std::vector<double>> lambda_by_order;
  std::vector<double> abscissa;
  for (std::size_t ni = 0; ni < config.n_values.size(); ++ni) {
    const int n = config.n_values[ni];
    // same lambda schedule for every derivative order (k enters eps_n only)
    const double lambda = rate_schedule(config.space, 0, n).lambda_n;
    const int reps = config.replications;
    std::map<int, std::vector<double>> errs;
    for (int k : config.orders) errs[k].resize(static_cast<std::size_t>(reps));

    parallel_for(static_cast<std::size_t>(reps), config.threads, [&](std::size_t r) {
      Rng rng = Rng::stream(config.seed,
                            static_cast<std::uint64_t>(ni) * static_cast<std::uint64_t>(reps) + r);
      Dataset data;
      data.x.resize(n);
      data.y.resize(n);
      for (int i = 0; i < n; ++i) data.x(i) = rng.next_uniform();
      const Vector f = series_eval_grid(truth, 0, data.x);
      for (int i = 0; i < n; ++i) data.y(i) = f(i) + sd * rng.next_normal();
      const FittedGP gp = fit(kernel, data, lambda, 1.0);
      for (int k : config.orders)
        errs.at(k)[r] = rmse(gp.posterior_mean_grid(k, grid), truth_grid.at(k));
    });

    const double logn = std::log(static_cast<double>(n));
    abscissa.push_back(holder ? std::log(static_cast<double>(n) / logn)
                              : std::log(std::sqrt(static_cast<double>(n)) / logn));
    for (int k : config.orders) {
      medians_by_order[k].push_back(median_of(errs.at(k)));
      lambda_by_order[k].push_back(lambda);
    }
  }

  for (int k : config.orders) {
    RateCurve curve;
    curve.order = k;
    std::vector<double> logmed;
    for (double v : medians_by_order.at(k)) logmed.push_back(std::log(v));
    curve.slope = fit_slope(abscissa, logmed);
    curve.theory_slope =
        holder ? -(config.space.param - static_cast<double>(k)) / (2.0 * config.space.param + 1.0)
               : -1.0;
    for (std::size_t i = 0; i < config.n_values.size(); ++i) {
      curve.medians.emplace_back(config.n_values[i], medians_by_order.at(k)[i]);
      curve.lambdas.emplace_back(config.n_values[i], lambda_by_order.at(k)[i]);
    }
    result.curves.push_back(std::move(curve));
  }
  return result;
}

double contraction_probe(const FittedGP& fit, int k, const Vector& grid,
                         const Vector& truth_on_grid, ProbeNorm norm, double radius, int m,
                         Rng& rng) {
  if (m < 100) throw ContractError("contraction_probe: m must be >= 100");
  if (radius < 0.0) throw ContractError("contraction_probe: radius must be >= 0");
  if (grid.size() != truth_on_grid.size())
    throw ContractError("contraction_probe: truth/grid length mismatch");
  const Matrix draws = sample_paths(fit, k, grid, m, rng);
  int outside = 0;
  for (int r = 0; r < m; ++r) {
    const Vector diff = draws.row(r).transpose() - truth_on_grid;
    const double dist = norm == ProbeNorm::L2
                            ? std::sqrt(diff.squaredNorm() / static_cast<double>(grid.size()))
                            : diff.cwiseAbs().maxCoeff();
    if (dist > radius) ++outside;
  }
  return static_cast<double>(outside) / static_cast<double>(m);
}

}  // namespace gpderiv
