#include "gpderiv/effective_dims.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gpderiv {

namespace {

// Number of terms needed so that the tail bound of sum_i w(i) mu_i/(lambda+mu_i)
// drops below rel_target of the partial sum, where w(i) <= amp * i^p. Uses
// mu/(lambda+mu) <= mu/lambda for the tail. Returns the cap when the target is
// unreachable within it.
std::int64_t adapt_terms(const EigenSequence& eig, double p, double amp, double lambda,
                         double partial_hint, double rel_target, std::int64_t cap) {
  std::int64_t n = 1024;
  while (n < cap) {
    const double tail = amp * eig.tail_weighted(p, n) / lambda;
    if (tail <= rel_target * std::max(partial_hint, 1e-300)) return n;
    n *= 2;
  }
  return cap;
}

double hat_partial(const EigenSequence& eig, double p, double lambda, std::int64_t n) {
  double s = 0.0;
  for (std::int64_t i = 1; i <= n; ++i) {
    const double mu = eig.mu(i);
    if (mu == 0.0) break;  // explicit list exhausted
    s += std::pow(static_cast<double>(i), p) * mu / (lambda + mu);
  }
  return s;
}

void quarter_phase(int k, double& a, double& b) {
  switch (((k % 4) + 4) % 4) {
    case 0: a = 1.0; b = 0.0; break;
    case 1: a = 0.0; b = -1.0; break;
    case 2: a = -1.0; b = 0.0; break;
    default: a = 0.0; b = 1.0; break;
  }
}

// sum_i nu_i phi_i^(k)(x)^2 at a single x, streamed with the rotation
// recurrence (two multiply-adds per term instead of a cos call).
double weighted_square_sum(BasisId basis, int k, const Vector& nu, double x) {
  constexpr double kPi = 3.14159265358979323846264338327950288;
  constexpr std::int64_t kRefresh = 1024;
  const std::int64_t n = nu.size();
  double pa, pb, qa, qb;
  quarter_phase(k, pa, pb);
  quarter_phase(k - 1, qa, qb);
  double acc = 0.0;
  auto powk = [k](double w) {
    double v = 1.0;
    for (int t = 0; t < k; ++t) v *= w;
    return v;
  };
  if (basis == BasisId::CosineHalf) {
    const double step = kPi * x;
    const double cs = std::cos(step), sn = std::sin(step);
    double c = std::cos(0.5 * step), s = std::sin(0.5 * step);
    for (std::int64_t i = 1; i <= n; ++i) {
      const double w = (static_cast<double>(i) - 0.5) * kPi;
      const double v = pa * c + pb * s;
      acc += nu(i - 1) * 2.0 * powk(w) * powk(w) * v * v;
      if (i % kRefresh == 0) {
        const double theta = (static_cast<double>(i) + 0.5) * step;
        c = std::cos(theta);
        s = std::sin(theta);
      } else {
        const double cn = c * cs - s * sn;
        s = s * cs + c * sn;
        c = cn;
      }
    }
    return acc;
  }
  const double step = 2.0 * kPi * x;
  const double cs = std::cos(step), sn = std::sin(step);
  if (k == 0) acc += nu(0);
  double c = cs, s = sn;
  std::int64_t m = 1;
  for (std::int64_t i = 2; i <= n; ++i) {
    const double w = 2.0 * kPi * static_cast<double>(m);
    const double w2k = powk(w) * powk(w);
    if (i % 2 == 0) {
      const double v = pa * c + pb * s;
      acc += nu(i - 1) * 2.0 * w2k * v * v;
    } else {
      const double v = qa * c + qb * s;
      acc += nu(i - 1) * 2.0 * w2k * v * v;
      ++m;
      if (m % kRefresh == 0) {
        c = std::cos(static_cast<double>(m) * step);
        s = std::sin(static_cast<double>(m) * step);
      } else {
        const double cn = c * cs - s * sn;
        s = s * cs + c * sn;
        c = cn;
      }
    }
  }
  return acc;
}

}  // namespace

EffectiveDims effective_dims(const EigenSequence& eig, BasisId basis, double lambda,
                             const std::set<int>& orders, const EffectiveDimsOptions& opts) {
  if (!(lambda > 0.0)) throw ContractError("effective_dims: lambda must be positive");
  if (opts.grid_size < 2) throw ContractError("effective_dims: grid_size must be >= 2");

  EffectiveDims out;
  out.lambda = lambda;

  std::set<int> ks = orders;
  ks.insert(0);
  for (int k : ks)
    if (k < 0) throw ContractError("effective_dims: orders must be nonnegative");

  // --- hat quantities (pure eigenvalue sums) ---
  auto hat_sum = [&](double p, double& value, bool& diverged) {
    if (!eig.tail_summable(p)) {
      diverged = true;
      value = std::numeric_limits<double>::infinity();
      return;
    }
    diverged = false;
    const double hint = hat_partial(eig, p, lambda, 256);
    const std::int64_t n =
        adapt_terms(eig, p, 1.0, lambda, hint, opts.tail_rel_target, opts.max_terms);
    value = hat_partial(eig, p, lambda, n);
    out.truncation = std::max(out.truncation, n);
    const double tail = eig.tail_weighted(p, n) / lambda;
    out.tail_bound = std::max(out.tail_bound, tail / std::max(value, 1e-300));
  };

  hat_sum(1.0, out.kappa_hat_01_sq, out.hat01_diverged);
  for (int k : ks) {
    double v = 0.0;
    bool div = false;
    hat_sum(2.0 * k + 2.0, v, div);
    out.kappa_hat_k1_sq[k] = v;
    out.kappa_hat_diverged[k] = div;
  }

  // --- sup quantities over the grid ---
  std::vector<double> grid_pts = linspace(0.0, 1.0, opts.grid_size);
  if (grid_pts.front() != 0.0) grid_pts.insert(grid_pts.begin(), 0.0);
  if (grid_pts.back() != 1.0) grid_pts.push_back(1.0);
  const Vector grid = to_vector(grid_pts);

  const double csq = kBasisSupBound * kBasisSupBound;
  for (int k : ks) {
    // sup_x sum_i nu_i phi_i^(k)(x)^2 needs sum mu_i i^{2k} summable.
    if (!eig.tail_summable(2.0 * k)) {
      out.kappa_tilde_diverged[k] = true;
      out.kappa_tilde_kk_sq[k] = std::numeric_limits<double>::infinity();
      out.kappa_tilde_kk_bound[k] = std::numeric_limits<double>::infinity();
      continue;
    }
    out.kappa_tilde_diverged[k] = false;
    const double pik = std::pow(M_PI, 2.0 * k);  // freq(i) <= pi i for both bases
    double bound_hint = 0.0;
    for (std::int64_t i = 1; i <= 256; ++i) {
      const double mu = eig.mu(i);
      if (mu == 0.0) break;
      const double amp = basis_amp(basis, i, k);
      bound_hint += mu / (lambda + mu) * amp * amp;
    }
    const std::int64_t n = adapt_terms(eig, 2.0 * k, csq * pik, lambda, bound_hint,
                                       opts.tail_rel_target,
                                       std::min(opts.max_terms, opts.sup_max_terms));
    double bound = 0.0;
    Vector nu(n);
    for (std::int64_t i = 1; i <= n; ++i) {
      const double mu = eig.mu(i);
      const double v = mu == 0.0 ? 0.0 : mu / (lambda + mu);
      nu(i - 1) = v;
      const double amp = basis_amp(basis, i, k);
      bound += v * amp * amp;
    }
    double sup = 0.0;
    for (Eigen::Index r = 0; r < grid.size(); ++r)
      sup = std::max(sup, weighted_square_sum(basis, k, nu, grid(r)));
    out.kappa_tilde_kk_sq[k] = sup;
    out.kappa_tilde_kk_bound[k] = bound;
    out.truncation = std::max(out.truncation, n);
    const double tail = csq * pik * eig.tail_weighted(2.0 * k, n) / lambda;
    out.tail_bound = std::max(out.tail_bound, tail / std::max(sup, 1e-300));
  }
  out.kappa_tilde_sq = out.kappa_tilde_kk_sq.at(0);
  out.kappa_tilde_sq_bound = out.kappa_tilde_kk_bound.at(0);
  return out;
}

double bound_constant(int n, double kappa_tilde) {
  if (n < 2) throw ContractError("bound_constant: n must be >= 2");
  if (!(kappa_tilde > 0.0)) throw ContractError("bound_constant: kappa_tilde must be > 0");
  const double root = std::sqrt(20.0 * std::log(static_cast<double>(n)));
  const double rn = std::sqrt(static_cast<double>(n));
  return (kappa_tilde * kappa_tilde * root / rn) * (4.0 + 4.0 * kappa_tilde * root / (3.0 * rn));
}

RateSchedule rate_schedule(const FunctionSpace& space, int k, int n) {
  if (n < 2) throw ContractError("rate_schedule: n must be >= 2");
  if (k < 0) throw ContractError("rate_schedule: k must be >= 0");
  const double nn = static_cast<double>(n);
  const double logn = std::log(nn);
  RateSchedule out;
  if (space.kind == FunctionSpace::Kind::Analytic) {
    if (k != 0) throw ContractError("analytic-class schedule covers k = 0 only");
    out.lambda_n = 1.0 / nn;
    out.eps_n = logn / std::sqrt(nn);
    return out;
  }
  const double a = space.param;
  if (!(a > 0.5)) throw ContractError("Holder schedule requires alpha > 1/2");
  const double ratio = logn / nn;
  out.lambda_n = std::pow(ratio, 2.0 * a / (2.0 * a + 1.0));
  out.eps_n = std::pow(ratio, (a - static_cast<double>(k)) / (2.0 * a + 1.0));
  out.derivative_guarantee = static_cast<double>(k) < a - 1.5;
  return out;
}

}  // namespace gpderiv
