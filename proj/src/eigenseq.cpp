#include "gpderiv/eigenseq.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace gpderiv {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

EigenSequence EigenSequence::polynomial(double alpha, double scale) {
  if (!(alpha > 0.5)) throw ContractError("polynomial eigenvalues require alpha > 1/2");
  if (!(scale > 0.0)) throw ContractError("eigenvalue scale must be positive");
  EigenSequence e;
  e.kind_ = Kind::Polynomial;
  e.alpha_ = alpha;
  e.scale_ = scale;
  return e;
}

EigenSequence EigenSequence::exponential(double gamma, double scale) {
  if (!(gamma > 0.0)) throw ContractError("exponential eigenvalues require gamma > 0");
  if (!(scale > 0.0)) throw ContractError("eigenvalue scale must be positive");
  EigenSequence e;
  e.kind_ = Kind::Exponential;
  e.gamma_ = gamma;
  e.scale_ = scale;
  return e;
}

EigenSequence EigenSequence::explicit_values(std::vector<double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0)) throw ContractError("explicit eigenvalues must be positive");
    if (i > 0 && values[i] > values[i - 1])
      throw ContractError("explicit eigenvalues must be nonincreasing");
  }
  EigenSequence e;
  e.kind_ = Kind::Explicit;
  e.values_ = std::move(values);
  return e;
}

double EigenSequence::mu(std::int64_t i) const {
  if (i < 1) throw ContractError("eigenvalue index must be >= 1");
  switch (kind_) {
    case Kind::Polynomial:
      return scale_ * std::pow(static_cast<double>(i), -2.0 * alpha_);
    case Kind::Exponential:
      return scale_ * std::exp(-2.0 * gamma_ * static_cast<double>(i));
    default:
      return i <= static_cast<std::int64_t>(values_.size())
                 ? values_[static_cast<std::size_t>(i - 1)]
                 : 0.0;
  }
}

bool EigenSequence::tail_summable(double p) const {
  switch (kind_) {
    case Kind::Polynomial:
      return 2.0 * alpha_ - p > 1.0;
    case Kind::Exponential:
      return true;
    default:
      return true;
  }
}

double EigenSequence::tail_weighted(double p, std::int64_t n) const {
  if (n < 0) n = 0;
  switch (kind_) {
    case Kind::Polynomial: {
      if (!tail_summable(p)) return kInf;
      // integrand decreasing in the tail, so sum_{i>n} <= integral from n
      // (valid for n >= 1; n = 0 adds the leading term explicitly)
      const double q = 2.0 * alpha_ - p;  // > 1
      if (n == 0) return scale_ * (1.0 + 1.0 / (q - 1.0));
      return scale_ * std::pow(static_cast<double>(n), 1.0 - q) / (q - 1.0);
    }
    case Kind::Exponential: {
      // i^p e^{-2 g i} <= M e^{-g i} with M = max_{i >= n+1} i^p e^{-g i},
      // then sum_{i >= n+1} M e^{-g i} = M e^{-g (n+1)} / (1 - e^{-g}).
      const double g = gamma_;
      const double i0 = static_cast<double>(n + 1);
      const double peak = p > 0.0 ? std::max(i0, p / g) : i0;
      const double mval = std::exp(p * std::log(peak) - g * peak);
      return scale_ * mval * std::exp(-g * i0) / (1.0 - std::exp(-g));
    }
    default: {
      double s = 0.0;
      for (std::int64_t i = n + 1; i <= static_cast<std::int64_t>(values_.size()); ++i)
        s += std::pow(static_cast<double>(i), p) * values_[static_cast<std::size_t>(i - 1)];
      return s;
    }
  }
}

std::string EigenSequence::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Polynomial:
      os << "polynomial(alpha=" << alpha_ << ", scale=" << scale_ << ")";
      break;
    case Kind::Exponential:
      os << "exponential(gamma=" << gamma_ << ", scale=" << scale_ << ")";
      break;
    default:
      os << "explicit(" << values_.size() << " values)";
      break;
  }
  return os.str();
}

}  // namespace gpderiv
