#include "gpderiv/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <vector>

namespace gpderiv {

namespace {

// Crossover between the Bessel-term path and the small-s series, in units of
// s = sqrt(2 nu) r. The series (12 terms per branch) holds machine precision
// well past this point, while the Bessel-term path loses roughly eps / s^m
// to cancellation for the m-th derivative, so the switch sits far above the
// bare 0/0 at s = 0.
constexpr double kMaternSeriesS = 0.35;

bool near_half_integer(double nu) {
  const double twice = 2.0 * nu;
  return std::abs(twice - std::round(twice)) < 1e-9 && std::round(twice) != 2.0 * std::round(nu);
}

bool near_integer(double nu) { return std::abs(nu - std::round(nu)) < 1e-9; }

// Polynomial in r with dense coefficients, lowest degree first.
using Poly = std::vector<double>;

double poly_eval(const Poly& p, double r) {
  double v = 0.0;
  for (std::size_t j = p.size(); j-- > 0;) v = v * r + p[j];
  return v;
}

// P -> P' - c P, the derivative recurrence for P(r) e^{-c r}.
Poly poly_deriv_step(const Poly& p, double c) {
  Poly out(std::max<std::size_t>(p.size(), 1), 0.0);
  for (std::size_t j = 0; j + 1 < p.size(); ++j)
    out[j] = static_cast<double>(j + 1) * p[j + 1];
  for (std::size_t j = 0; j < p.size(); ++j) out[j] -= c * p[j];
  return out;
}

// ---------------------------------------------------------------------------
// Matern radial profile g(d) = K(|d|) and its derivatives in d.
// ---------------------------------------------------------------------------

// Half-integer nu = p + 1/2: K(r) = e^{-c r} (p!/(2p)!) sum_i
// ((p+i)!/(i!(p-i)!)) (2 c r)^{p-i}, c = sqrt(2 nu). Exact for all r.
struct HalfIntProfile {
  double c = 0.0;
  std::vector<Poly> derivs;  // derivs[m](r) e^{-c r} = h^{(m)}(r)

  HalfIntProfile(int p, double c_in, int max_total_order) : c(c_in) {
    Poly base(static_cast<std::size_t>(p) + 1, 0.0);
    double lead = 1.0;  // p! / (2p)!
    for (int i = p + 1; i <= 2 * p; ++i) lead /= static_cast<double>(i);
    for (int i = 0; i <= p; ++i) {
      // (p+i)! / (i! (p-i)!) * (2c)^{p-i} r^{p-i}
      double coef = 1.0;
      for (int t = p - i + 1; t <= p + i; ++t) coef *= static_cast<double>(t);
      for (int t = 2; t <= i; ++t) coef /= static_cast<double>(t);
      for (int t = 0; t < p - i; ++t) coef *= 2.0 * c;
      base[static_cast<std::size_t>(p - i)] = lead * coef;
    }
    derivs.push_back(base);
    for (int m = 1; m <= max_total_order; ++m)
      derivs.push_back(poly_deriv_step(derivs.back(), c));
  }

  double deriv(int m, double d) const {
    const double ad = std::abs(d);
    if (ad == 0.0 && m % 2 != 0) return 0.0;  // even radial profile
    const double v = poly_eval(derivs[static_cast<std::size_t>(m)], ad) * std::exp(-c * ad);
    return (m % 2 != 0 && d < 0.0) ? -v : v;
  }
};

// General nu: moderate r uses symbolic differentiation of c_nu s^nu K_nu(s),
// s = c |d|, via d/ds [s^a K_b(s)] = a s^{a-1} K_b - s^a (K_{b-1} + K_{b+1})/2.
// Small r uses a power series in |d| with optional log terms (integer nu).
struct GeneralProfile {
  double nu = 0.0;
  double c = 0.0;     // sqrt(2 nu)
  double cnu = 0.0;   // 2^{1-nu} / Gamma(nu)

  // Bessel-term expansions per total order m: list of (a, b, coef) meaning
  // coef * s^a * K_b(s); the m-th x-derivative additionally carries
  // (c sign(d))^m.
  struct BTerm { double a; double b; double coef; };
  std::vector<std::vector<BTerm>> bessel_terms;

  // Small-r series terms: coef_plain * |d|^p + coef_log * |d|^p log|d|.
  struct STerm { double p; double plain; double log; };
  std::vector<STerm> series;

  GeneralProfile(double nu_in, int max_total_order) : nu(nu_in) {
    c = std::sqrt(2.0 * nu);
    cnu = std::pow(2.0, 1.0 - nu) / std::tgamma(nu);
    build_bessel(max_total_order);
    build_series();
  }

  void build_bessel(int max_total_order) {
    std::map<std::pair<double, double>, double> terms;
    terms[{nu, nu}] = 1.0;
    bessel_terms.push_back(flatten(terms));
    for (int m = 1; m <= max_total_order; ++m) {
      std::map<std::pair<double, double>, double> next;
      for (const auto& [ab, coef] : terms) {
        const auto [a, b] = ab;
        if (a != 0.0) next[{a - 1.0, b}] += coef * a;
        next[{a, b - 1.0}] -= 0.5 * coef;
        next[{a, b + 1.0}] -= 0.5 * coef;
      }
      terms = std::move(next);
      bessel_terms.push_back(flatten(terms));
    }
  }

  static std::vector<BTerm> flatten(const std::map<std::pair<double, double>, double>& m) {
    std::vector<BTerm> out;
    out.reserve(m.size());
    for (const auto& [ab, coef] : m) out.push_back({ab.first, ab.second, coef});
    return out;
  }

  void build_series() {
    constexpr int kJmax = 12;
    const double logc = std::log(c);
    if (!near_integer(nu)) {
      // h(s) = cnu * pi/(2 sin(nu pi)) [ s^nu I_{-nu}(s) - s^nu I_nu(s) ]
      const double amp = M_PI / (2.0 * std::sin(nu * M_PI));
      for (int j = 0; j < kJmax; ++j) {
        const double lgj = std::lgamma(static_cast<double>(j) + 1.0);
        double co = cnu * amp * std::pow(2.0, nu - 2.0 * j) /
                    std::exp(lgj + std::lgamma(static_cast<double>(j) - nu + 1.0));
        // Gamma(j - nu + 1) may be negative; lgamma loses the sign.
        if (negative_gamma(static_cast<double>(j) - nu + 1.0)) co = -co;
        series.push_back({2.0 * j, co * std::pow(c, 2.0 * j), 0.0});
        const double co2 = -cnu * amp * std::pow(2.0, -nu - 2.0 * j) /
                           std::exp(lgj + std::lgamma(static_cast<double>(j) + nu + 1.0));
        const double p = 2.0 * nu + 2.0 * j;
        series.push_back({p, co2 * std::pow(c, p), 0.0});
      }
      return;
    }
    // Integer nu = n: z^n K_n(z) = 2^{n-1} sum_{j<n} ((n-j-1)!/j!) (-1)^j (z/2)^{2j}
    //   + (-1)^{n+1} log(z/2) z^n I_n(z)
    //   + (-1)^n (1/2) sum_j (psi(j+1) + psi(n+j+1)) 2^{-n-2j} z^{2n+2j} / (j! (n+j)!)
    const int n = static_cast<int>(std::round(nu));
    for (int j = 0; j < n; ++j) {
      const double co = cnu * std::pow(2.0, n - 1) *
                        std::exp(std::lgamma(n - j) - std::lgamma(j + 1.0)) *
                        ((j % 2 == 0) ? 1.0 : -1.0) * std::pow(4.0, -j);
      series.push_back({2.0 * j, co * std::pow(c, 2.0 * j), 0.0});
    }
    const double signn = (n % 2 == 0) ? 1.0 : -1.0;
    for (int j = 0; j < kJmax; ++j) {
      const double base = std::pow(2.0, -n - 2.0 * j) /
                          std::exp(std::lgamma(j + 1.0) + std::lgamma(n + j + 1.0));
      const double p = 2.0 * n + 2.0 * j;
      const double cp = std::pow(c, p);
      // log(z/2) = log|d| + log c - log 2
      const double colog = cnu * (-signn) * base;
      series.push_back({p, colog * (logc - std::log(2.0)) * cp, colog * cp});
      const double co2 = cnu * signn * 0.5 * (digamma_int(j + 1) + digamma_int(n + j + 1)) * base;
      series.push_back({p, co2 * cp, 0.0});
    }
  }

  static bool negative_gamma(double x) {
    // sign of Gamma(x): negative on (-1,0), (-3,-2), ... ; x here is never a
    // nonpositive integer because nu is not an integer on this path.
    if (x > 0.0) return false;
    const long long f = static_cast<long long>(std::floor(x));
    return (f % 2) != 0;
  }

  static double digamma_int(int n) {
    // psi(n) = -euler_gamma + sum_{t=1}^{n-1} 1/t
    double s = -0.5772156649015328606;
    for (int t = 1; t < n; ++t) s += 1.0 / static_cast<double>(t);
    return s;
  }

  double deriv(int m, double d) const {
    const double ad = std::abs(d);
    const double s = c * ad;
    if (s < kMaternSeriesS) return series_deriv(m, d);
    double tot = 0.0;
    for (const auto& t : bessel_terms[static_cast<std::size_t>(m)])
      tot += t.coef * std::pow(s, t.a) * std::cyl_bessel_k(std::abs(t.b), s);
    tot *= cnu * std::pow(c, m);
    return (m % 2 != 0 && d < 0.0) ? -tot : tot;
  }

  double series_deriv(int m, double d) const {
    const double ad = std::abs(d);
    double tot = 0.0;
    for (const auto& t : series) {
      double p = t.p, cl = t.log, cp = t.plain;
      for (int step = 0; step < m; ++step) {
        const double ncp = cp * p + cl;
        cl *= p;
        cp = ncp;
        p -= 1.0;
      }
      if (ad == 0.0) {
        if (p == 0.0 && cl == 0.0) tot += cp;
        // p > 0 terms vanish; the supported orders never leave p < 0 or a
        // bare log at zero.
        continue;
      }
      double v = cp * std::pow(ad, p);
      if (cl != 0.0) v += cl * std::pow(ad, p) * std::log(ad);
      tot += v;
    }
    return (m % 2 != 0 && d < 0.0) ? -tot : tot;
  }
};

// ---------------------------------------------------------------------------

int matern_max_order(double nu) {
  // ceil(nu) - 1: the largest k with 2k < 2 nu, enforced conservatively.
  return static_cast<int>(std::ceil(nu - 1e-12)) - 1;
}

constexpr int kSmoothOrderCap = 32;

double hermite_physicists(int m, double d) {
  // H_0 = 1, H_1 = 2d, H_{m+1} = 2 d H_m - 2 m H_{m-1}
  double hm1 = 1.0, hm = 2.0 * d;
  if (m == 0) return hm1;
  for (int t = 1; t < m; ++t) {
    const double next = 2.0 * d * hm - 2.0 * static_cast<double>(t) * hm1;
    hm1 = hm;
    hm = next;
  }
  return hm;
}

}  // namespace

struct KernelSpec::Impl {
  Family family = Family::SquaredExponential;
  Interval dom{0.0, 1.0};
  double nu = 0.0;

  std::unique_ptr<HalfIntProfile> half;
  std::unique_ptr<GeneralProfile> general;

  BasisId basis_id = BasisId::FourierL2;
  EigenSequence eig;
  std::int64_t trunc = 0;
  std::vector<double> mu_cache;  // materialized eigenvalues, spectral only

  int max_order() const {
    switch (family) {
      case Family::Matern: return matern_max_order(nu);
      case Family::SquaredExponential: return kSmoothOrderCap;
      case Family::Sobolev2: return 1;
      case Family::Spectral:
        switch (eig.kind()) {
          case EigenSequence::Kind::Polynomial: {
            // termwise differentiation needs sum mu_i i^{2k} finite: k < alpha - 1/2
            const int k = static_cast<int>(std::ceil(eig.alpha() - 0.5 - 1e-12)) - 1;
            return std::max(0, k);
          }
          default: return kSmoothOrderCap;
        }
    }
    return 0;
  }
};

KernelSpec KernelSpec::matern(double nu, Interval domain) {
  if (!(nu > 0.0)) throw ContractError("Matern kernel requires nu > 0");
  auto impl = std::make_shared<Impl>();
  impl->family = Family::Matern;
  impl->dom = domain;
  impl->nu = nu;
  const int max_total = 2 * std::max(0, matern_max_order(nu));
  if (near_half_integer(nu)) {
    const int p = static_cast<int>(std::round(nu - 0.5));
    impl->half = std::make_unique<HalfIntProfile>(p, std::sqrt(2.0 * nu), max_total);
  } else {
    impl->general = std::make_unique<GeneralProfile>(nu, max_total);
  }
  KernelSpec k;
  k.impl = std::move(impl);
  return k;
}

KernelSpec KernelSpec::squared_exponential(Interval domain) {
  auto impl = std::make_shared<Impl>();
  impl->family = Family::SquaredExponential;
  impl->dom = domain;
  KernelSpec k;
  k.impl = std::move(impl);
  return k;
}

KernelSpec KernelSpec::sobolev2() {
  auto impl = std::make_shared<Impl>();
  impl->family = Family::Sobolev2;
  impl->dom = {0.0, 1.0};
  KernelSpec k;
  k.impl = std::move(impl);
  return k;
}

KernelSpec KernelSpec::spectral(BasisId basis, EigenSequence eigenvalues,
                                std::int64_t truncation) {
  if (truncation < 1) throw ContractError("spectral truncation must be >= 1");
  auto impl = std::make_shared<Impl>();
  impl->family = Family::Spectral;
  impl->dom = {0.0, 1.0};
  impl->basis_id = basis;
  impl->eig = std::move(eigenvalues);
  if (impl->eig.kind() == EigenSequence::Kind::Explicit)
    truncation = std::min<std::int64_t>(
        truncation, static_cast<std::int64_t>(impl->eig.values().size()));
  impl->trunc = truncation;
  impl->mu_cache.resize(static_cast<std::size_t>(std::max<std::int64_t>(truncation, 0)));
  for (std::int64_t i = 1; i <= truncation; ++i)
    impl->mu_cache[static_cast<std::size_t>(i - 1)] = impl->eig.mu(i);
  KernelSpec k;
  k.impl = std::move(impl);
  return k;
}

KernelSpec::Family KernelSpec::family() const { return impl->family; }
Interval KernelSpec::domain() const { return impl->dom; }

double KernelSpec::matern_nu() const {
  if (impl->family != Family::Matern) throw UnsupportedKernelError("not a Matern kernel");
  return impl->nu;
}

bool KernelSpec::is_spectral() const { return impl->family == Family::Spectral; }

BasisId KernelSpec::basis() const {
  if (!is_spectral()) throw UnsupportedKernelError("kernel has no tracked eigensystem");
  return impl->basis_id;
}

const EigenSequence& KernelSpec::eigenvalues() const {
  if (!is_spectral()) throw UnsupportedKernelError("kernel has no tracked eigensystem");
  return impl->eig;
}

std::int64_t KernelSpec::truncation() const {
  if (!is_spectral()) throw UnsupportedKernelError("kernel has no tracked eigensystem");
  return impl->trunc;
}

int KernelSpec::max_deriv_order() const { return impl->max_order(); }

double KernelSpec::spectral_tail_bound() const {
  if (!is_spectral()) return 0.0;
  return kBasisSupBound * kBasisSupBound * impl->eig.tail_weighted(0.0, impl->trunc);
}

std::string KernelSpec::describe() const {
  std::ostringstream os;
  switch (impl->family) {
    case Family::Matern: os << "matern(nu=" << impl->nu << ")"; break;
    case Family::SquaredExponential: os << "se"; break;
    case Family::Sobolev2: os << "sobolev2"; break;
    case Family::Spectral:
      os << "spectral(" << basis_name(impl->basis_id) << ", " << impl->eig.describe()
         << ", N=" << impl->trunc << ")";
      break;
  }
  return os.str();
}

namespace {

void check_point(const KernelSpec& k, double x) {
  if (!k.domain().contains(x)) {
    std::ostringstream os;
    os << "point " << x << " outside kernel domain [" << k.domain().lo << ", "
       << k.domain().hi << "]";
    throw DomainError(os.str());
  }
}

void check_orders(const KernelSpec& k, int jx, int jxp) {
  if (jx < 0 || jxp < 0) throw ContractError("derivative orders must be >= 0");
  const int cap = k.max_deriv_order();
  if (jx > cap || jxp > cap) {
    std::ostringstream os;
    os << "derivative order (" << jx << ", " << jxp << ") exceeds kernel smoothness ("
       << k.describe() << " supports orders <= " << cap << ")";
    throw CapabilityError(os.str());
  }
}

double sobolev2_deriv(int jx, int jxp, double x, double xp) {
  const double m = std::min(x, xp);
  const double big = std::max(x, xp);
  if (jx == 0 && jxp == 0) return 1.0 + x * xp + m * m * (3.0 * big - m) / 6.0;
  if (jx == 1 && jxp == 1) return 1.0 + m;
  // single first derivative in the argument `u`, evaluated at (u, v)
  auto d10 = [](double u, double v) {
    return u <= v ? v + u * v - 0.5 * u * u : v + 0.5 * v * v;
  };
  return jx == 1 ? d10(x, xp) : d10(xp, x);
}

double se_deriv(int jx, int jxp, double x, double xp) {
  const double d = x - xp;
  const int m = jx + jxp;
  const double sign = (jx % 2 == 0) ? 1.0 : -1.0;
  return sign * hermite_physicists(m, d) * std::exp(-d * d);
}

double spectral_deriv(const KernelSpec::Impl& impl, int jx, int jxp, double x, double xp) {
  double s = 0.0;
  for (std::int64_t i = 1; i <= impl.trunc; ++i) {
    const double mu = impl.mu_cache[static_cast<std::size_t>(i - 1)];
    if (mu == 0.0) continue;
    // grouping the eigenfunction product first keeps eval symmetric bit-exactly
    const double prod =
        basis_eval(impl.basis_id, i, jx, x) * basis_eval(impl.basis_id, i, jxp, xp);
    s += mu * prod;
  }
  return s;
}

}  // namespace

double eval_deriv(const KernelSpec& k, int jx, int jxp, double x, double xp) {
  check_orders(k, jx, jxp);
  check_point(k, x);
  check_point(k, xp);
  const auto& impl = *k.impl;
  switch (impl.family) {
    case KernelSpec::Family::SquaredExponential:
      return se_deriv(jx, jxp, x, xp);
    case KernelSpec::Family::Sobolev2:
      return sobolev2_deriv(jx, jxp, x, xp);
    case KernelSpec::Family::Matern: {
      const int m = jx + jxp;
      const double d = x - xp;
      const double v = impl.half ? impl.half->deriv(m, d) : impl.general->deriv(m, d);
      return (jxp % 2 == 0) ? v : -v;
    }
    case KernelSpec::Family::Spectral:
      return spectral_deriv(impl, jx, jxp, x, xp);
  }
  throw ContractError("unreachable kernel family");
}

double eval(const KernelSpec& k, double x, double xp) { return eval_deriv(k, 0, 0, x, xp); }

Matrix cross_gram(const KernelSpec& k, const Vector& a, const Vector& b, int ja, int jb) {
  check_orders(k, ja, jb);
  for (Eigen::Index i = 0; i < a.size(); ++i) check_point(k, a(i));
  for (Eigen::Index i = 0; i < b.size(); ++i) check_point(k, b(i));
  const auto& impl = *k.impl;
  if (impl.family == KernelSpec::Family::Spectral) {
    if (impl.trunc == 0) return Matrix::Zero(a.size(), b.size());
    // Phi_a diag(mu) Phi_b^T; one GEMM instead of N terms per entry.
    const Vector mu = Eigen::Map<const Vector>(
        impl.mu_cache.data(), static_cast<Eigen::Index>(impl.mu_cache.size()));
    Matrix pa = basis_matrix(impl.basis_id, ja, a, impl.trunc);
    Matrix pb = basis_matrix(impl.basis_id, jb, b, impl.trunc);
    pa *= mu.asDiagonal();
    return pa * pb.transpose();
  }
  Matrix out(a.size(), b.size());
  for (Eigen::Index j = 0; j < b.size(); ++j)
    for (Eigen::Index i = 0; i < a.size(); ++i)
      out(i, j) = eval_deriv(k, ja, jb, a(i), b(j));
  return out;
}

Matrix gram(const KernelSpec& k, const Vector& x, int jx, int jxp) {
  check_orders(k, jx, jxp);
  if (x.size() < 1) throw ContractError("gram: design must be nonempty");
  for (Eigen::Index i = 0; i < x.size(); ++i) check_point(k, x(i));
  const auto& impl = *k.impl;
  if (impl.family == KernelSpec::Family::Spectral) {
    if (impl.trunc == 0) return Matrix::Zero(x.size(), x.size());
    const Vector mu = Eigen::Map<const Vector>(
        impl.mu_cache.data(), static_cast<Eigen::Index>(impl.mu_cache.size()));
    if (jx == jxp) {
      // B B^T with B = Phi diag(sqrt(mu)): exactly symmetric and PSD.
      Matrix b = basis_matrix(impl.basis_id, jx, x, impl.trunc);
      b *= mu.cwiseSqrt().asDiagonal();
      return b * b.transpose();
    }
    return cross_gram(k, x, x, jx, jxp);
  }
  const Eigen::Index n = x.size();
  Matrix out(n, n);
  if (jx == jxp) {
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = j; i < n; ++i) {
        const double v = eval_deriv(k, jx, jxp, x(i), x(j));
        out(i, j) = v;
        out(j, i) = v;
      }
    }
    return out;
  }
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) out(i, j) = eval_deriv(k, jx, jxp, x(i), x(j));
  return out;
}

KernelSpec equivalent_kernel(const KernelSpec& k, double lambda) {
  if (!(lambda > 0.0)) throw ContractError("equivalent kernel requires lambda > 0");
  if (!k.is_spectral())
    throw UnsupportedKernelError(
        "equivalent kernel needs a spectral kernel; closed-form kernels have no "
        "tracked eigensystem");
  const auto& impl = *k.impl;
  std::vector<double> nu(impl.mu_cache.size());
  for (std::size_t i = 0; i < nu.size(); ++i)
    nu[i] = impl.mu_cache[i] / (lambda + impl.mu_cache[i]);
  return KernelSpec::spectral(impl.basis_id, EigenSequence::explicit_values(std::move(nu)),
                              std::max<std::int64_t>(impl.trunc, 1));
}

}  // namespace gpderiv
