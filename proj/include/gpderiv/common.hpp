#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace gpderiv {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A query point lies outside the kernel domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A precondition on arguments was violated (construction or call contract).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// A derivative order exceeds what the kernel smoothness supports.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// An operation requires a tracked eigensystem that this kernel lacks.
class UnsupportedKernelError : public Error {
 public:
  using Error::Error;
};

/// A factorization or iteration failed beyond recovery; carries diagnostics.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Every candidate of a model-selection sweep failed.
class SelectionError : public Error {
 public:
  using Error::Error;
};

/// A config file failed strict parsing.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Reading or writing an artifact file failed.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Closed interval; the domain of every kernel in this library.
struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  bool contains(double x) const { return x >= lo && x <= hi; }
  double length() const { return hi - lo; }
};

/// Inclusive equispaced grid with `count >= 2` points.
inline std::vector<double> linspace(double lo, double hi, int count) {
  if (count < 2) throw ContractError("linspace: count must be >= 2");
  std::vector<double> g(static_cast<std::size_t>(count));
  for (int t = 0; t < count; ++t)
    g[static_cast<std::size_t>(t)] = lo + (hi - lo) * t / (count - 1);
  return g;
}

/// Log-spaced grid, inclusive endpoints.
inline std::vector<double> logspace(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > 0.0)) throw ContractError("logspace: endpoints must be positive");
  if (count < 2) throw ContractError("logspace: count must be >= 2");
  std::vector<double> g(static_cast<std::size_t>(count));
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int t = 0; t < count; ++t)
    g[static_cast<std::size_t>(t)] = std::exp(llo + (lhi - llo) * t / (count - 1));
  return g;
}

inline Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace gpderiv
