#include "gpderiv/basis.hpp"

#include <cmath>

namespace gpderiv {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kSqrt2 = 1.41421356237309504880168872420969808;

// cos(theta + k*pi/2) decomposed as a*cos(theta) + b*sin(theta) with exact
// integer coefficients depending on k mod 4.
void quarter_phase(int k, double& a, double& b) {
  switch (((k % 4) + 4) % 4) {
    case 0: a = 1.0; b = 0.0; break;
    case 1: a = 0.0; b = -1.0; break;
    case 2: a = -1.0; b = 0.0; break;
    default: a = 0.0; b = 1.0; break;
  }
}

}  // namespace

std::string basis_name(BasisId b) {
  return b == BasisId::FourierL2 ? "fourier" : "coshalf";
}

BasisId parse_basis(const std::string& name) {
  if (name == "fourier") return BasisId::FourierL2;
  if (name == "coshalf") return BasisId::CosineHalf;
  throw ContractError("unknown basis name: " + name);
}

double basis_freq(BasisId b, std::int64_t i) {
  if (i < 1) throw ContractError("basis index must be >= 1");
  if (b == BasisId::FourierL2) return 2.0 * kPi * static_cast<double>(i / 2);
  return (static_cast<double>(i) - 0.5) * kPi;
}

double basis_eval(BasisId b, std::int64_t i, int k, double x) {
  if (i < 1) throw ContractError("basis index must be >= 1");
  if (k < 0) throw ContractError("derivative order must be >= 0");
  if (b == BasisId::FourierL2) {
    if (i == 1) return k == 0 ? 1.0 : 0.0;
    const double w = basis_freq(b, i);
    const double wk = std::pow(w, k);
    double a, s;
    quarter_phase(k, a, s);
    const double theta = w * x;
    if (i % 2 == 0) {
      // sqrt(2) cos(wx + k pi/2)
      return kSqrt2 * wk * (a * std::cos(theta) + s * std::sin(theta));
    }
    // sqrt(2) sin(wx + k pi/2) = sqrt(2) cos(wx + (k-1) pi/2)
    double a2, s2;
    quarter_phase(k - 1, a2, s2);
    return kSqrt2 * wk * (a2 * std::cos(theta) + s2 * std::sin(theta));
  }
  const double w = basis_freq(b, i);
  const double wk = std::pow(w, k);
  double a, s;
  quarter_phase(k, a, s);
  const double theta = w * x;
  return kSqrt2 * wk * (a * std::cos(theta) + s * std::sin(theta));
}

double basis_amp(BasisId b, std::int64_t i, int k) {
  if (b == BasisId::FourierL2 && i == 1) return k == 0 ? 1.0 : 0.0;
  return kSqrt2 * std::pow(basis_freq(b, i), k);
}

Matrix basis_matrix(BasisId b, int k, const Vector& points, std::int64_t n_funcs) {
  if (n_funcs < 0) throw ContractError("basis_matrix: n_funcs must be >= 0");
  const Eigen::Index n = points.size();
  Matrix out(n, static_cast<Eigen::Index>(n_funcs));
  if (n_funcs == 0) return out;

  double pa, pb;
  quarter_phase(k, pa, pb);
  // sin(theta + k pi/2) = cos(theta + (k-1) pi/2)
  double qa, qb;
  quarter_phase(k - 1, qa, qb);

  constexpr std::int64_t kRefresh = 1024;

  if (b == BasisId::CosineHalf) {
    for (Eigen::Index r = 0; r < n; ++r) {
      const double x = points(r);
      const double step = kPi * x;
      const double cs = std::cos(step), sn = std::sin(step);
      double c = std::cos(0.5 * step), s = std::sin(0.5 * step);  // theta_1 = pi x / 2
      for (std::int64_t i = 1; i <= n_funcs; ++i) {
        const double w = (static_cast<double>(i) - 0.5) * kPi;
        out(r, static_cast<Eigen::Index>(i - 1)) =
            kSqrt2 * std::pow(w, k) * (pa * c + pb * s);
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
    }
    return out;
  }

  for (Eigen::Index r = 0; r < n; ++r) {
    const double x = points(r);
    const double step = 2.0 * kPi * x;
    const double cs = std::cos(step), sn = std::sin(step);
    out(r, 0) = k == 0 ? 1.0 : 0.0;
    double c = cs, s = sn;  // theta_m = 2 pi m x starting at m = 1
    std::int64_t m = 1;
    for (std::int64_t i = 2; i <= n_funcs; ++i) {
      const double w = 2.0 * kPi * static_cast<double>(m);
      const double wk = std::pow(w, k);
      if (i % 2 == 0) {
        out(r, static_cast<Eigen::Index>(i - 1)) = kSqrt2 * wk * (pa * c + pb * s);
      } else {
        out(r, static_cast<Eigen::Index>(i - 1)) = kSqrt2 * wk * (qa * c + qb * s);
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
  }
  return out;
}

}  // namespace gpderiv
