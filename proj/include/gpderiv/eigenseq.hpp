#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gpderiv/common.hpp"

namespace gpderiv {

/// Eigenvalue sequence of a Mercer kernel. Polynomial decay mu_i = c i^(-2a),
/// exponential decay mu_i = c e^(-2g i), or an explicit finite list.
class EigenSequence {
 public:
  enum class Kind { Polynomial, Exponential, Explicit };

  static EigenSequence polynomial(double alpha, double scale = 1.0);
  static EigenSequence exponential(double gamma, double scale = 1.0);
  /// Explicit nonincreasing positive values; an empty list is allowed and
  /// yields the zero kernel (used as a degenerate oracle).
  static EigenSequence explicit_values(std::vector<double> values);

  Kind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  double gamma() const { return gamma_; }
  double scale() const { return scale_; }
  const std::vector<double>& values() const { return values_; }

  /// mu(i), 1-based. Explicit sequences return 0 beyond their stored length.
  double mu(std::int64_t i) const;

  /// Whether sum_i i^p mu(i) converges.
  bool tail_summable(double p) const;

  /// Upper bound on sum_{i > n} i^p mu(i); +inf when not summable.
  double tail_weighted(double p, std::int64_t n) const;

  std::string describe() const;

 private:
  Kind kind_ = Kind::Explicit;
  double alpha_ = 0.0;
  double gamma_ = 0.0;
  double scale_ = 1.0;
  std::vector<double> values_;
};

}  // namespace gpderiv
