#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gpderiv/effective_dims.hpp"
#include "gpderiv/experiments.hpp"
#include "gpderiv/rng.hpp"
#include "gpderiv/series.hpp"

using namespace gpderiv;

namespace {

constexpr double kPi = 3.14159265358979323846;

SeriesFunction holder_like_f0(std::int64_t n) {
  // the simulation truth's coefficient profile mapped onto Fourier indices
  SeriesFunction f;
  f.basis = BasisId::FourierL2;
  f.coeffs.resize(n);
  for (std::int64_t i = 1; i <= n; ++i)
    f.coeffs(i - 1) = std::sin(static_cast<double>(i)) / std::pow(static_cast<double>(i), 4.0);
  return f;
}

}  // namespace

TEST_CASE("series evaluation") {
  SUBCASE("constant function on the Fourier basis") {
    SeriesFunction f{BasisId::FourierL2, Vector::Ones(1)};
    for (double x : {0.0, 0.3, 1.0}) CHECK(series_eval(f, 0, x) == doctest::Approx(1.0));
    CHECK(series_eval(f, 1, 0.5) == doctest::Approx(0.0));
  }
  SUBCASE("one-term calculus: psi_2 = sqrt(2) cos(2 pi x)") {
    Vector c = Vector::Zero(2);
    c(1) = 1.0;
    SeriesFunction f{BasisId::FourierL2, c};
    CHECK(series_eval(f, 1, 0.25) ==
          doctest::Approx(-2.0 * std::sqrt(2.0) * kPi).epsilon(1e-13));
  }
  SUBCASE("every derivative term of the simulation truth vanishes at zero") {
    CHECK(true_target(1, 0.0) == 0.0);
    CHECK(series_eval(simulation_truth(), 1, 0.0) == 0.0);
  }
  SUBCASE("grid evaluation matches pointwise evaluation") {
    const SeriesFunction f = holder_like_f0(300);
    const Vector grid = to_vector(linspace(0.0, 1.0, 17));
    for (int k : {0, 1, 2}) {
      const Vector g = series_eval_grid(f, k, grid);
      for (Eigen::Index i = 0; i < grid.size(); ++i)
        CHECK(g(i) == doctest::Approx(series_eval(f, k, grid(i))).epsilon(1e-11));
    }
  }
}

TEST_CASE("f_lambda") {
  const auto eig = EigenSequence::explicit_values({1.0, 0.5, 0.25});
  Vector c(3);
  c << 1.0, -2.0, 0.5;
  const SeriesFunction f0{BasisId::FourierL2, c};

  SUBCASE("lambda = 0 is the identity") {
    const SeriesFunction fl = f_lambda(f0, eig, 0.0);
    CHECK((fl.coeffs - f0.coeffs).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("unit eigenvalue and unit lambda halve the coefficient") {
    Vector one = Vector::Zero(3);
    one(0) = 1.0;
    const SeriesFunction g{BasisId::FourierL2, one};
    CHECK(f_lambda(g, eig, 1.0).coeffs(0) == doctest::Approx(0.5));
  }
  SUBCASE("residual identity: coef_i(f_lambda - f0) = -lambda f_i / (lambda + mu_i)") {
    const double lambda = 0.37;
    const SeriesFunction fl = f_lambda(f0, eig, lambda);
    for (int i = 0; i < 3; ++i) {
      const double expected = -lambda * c(i) / (lambda + eig.mu(i + 1));
      CHECK(fl.coeffs(i) - c(i) == doctest::Approx(expected).epsilon(1e-14));
    }
  }
  SUBCASE("contraction: coefficients never grow") {
    Rng rng(11);
    const SeriesFunction f = holder_like_f0(200);
    const auto poly = EigenSequence::polynomial(2.0);
    for (double lambda : {0.0, 1e-6, 1e-2, 1.0, 50.0}) {
      const SeriesFunction fl = f_lambda(f, poly, lambda);
      for (Eigen::Index i = 0; i < f.coeffs.size(); ++i)
        CHECK(std::abs(fl.coeffs(i)) <= std::abs(f.coeffs(i)) + 1e-300);
    }
  }
}

TEST_CASE("space norms") {
  SUBCASE("single leading coefficient") {
    SeriesFunction f{BasisId::FourierL2, Vector::Ones(1)};
    for (double a : {0.5, 1.0, 3.0, 7.5})
      CHECK(space_norm(f, FunctionSpace::holder(a)) == doctest::Approx(1.0));
    CHECK(space_norm(f, FunctionSpace::analytic(2.0)) == doctest::Approx(std::exp(2.0)));
  }
  SUBCASE("zero iff all coefficients zero") {
    SeriesFunction z{BasisId::CosineHalf, Vector::Zero(5)};
    CHECK(space_norm(z, FunctionSpace::holder(3.0)) == 0.0);
    z.coeffs(3) = 1e-9;
    CHECK(space_norm(z, FunctionSpace::holder(3.0)) > 0.0);
  }
  SUBCASE("simulation truth: log growth at alpha = 3, polynomial blowup at 3.6") {
    // truncated-sum oracle at growing N: the alpha = 3 norm grows like log N
    // (bounded increments per decade) while alpha = 3.6 grows polynomially
    const auto at = [](std::int64_t n, double a) {
      SeriesFunction f;
      f.basis = BasisId::CosineHalf;
      f.coeffs.resize(n);
      for (std::int64_t i = 1; i <= n; ++i)
        f.coeffs(i - 1) =
            std::sin(static_cast<double>(i)) / std::pow(static_cast<double>(i), 4.0);
      return space_norm(f, FunctionSpace::holder(a));
    };
    const double h3_3 = at(1000, 3.0), h3_4 = at(10000, 3.0), h3_5 = at(100000, 3.0);
    CHECK(h3_4 - h3_3 < 3.0);
    CHECK(h3_5 - h3_4 < 3.0);
    const double h36_4 = at(10000, 3.6), h36_5 = at(100000, 3.6);
    CHECK(h36_5 / h36_4 > 2.0);
  }
}

TEST_CASE("effective dimensions") {
  SUBCASE("single explicit eigenvalue") {
    const auto eig = EigenSequence::explicit_values({1.0});
    const EffectiveDims d = effective_dims(eig, BasisId::CosineHalf, 1.0, {0});
    CHECK(d.kappa_hat_01_sq == doctest::Approx(0.5).epsilon(1e-12));
    // sup of nu_1 phi_1(x)^2 = 0.5 * 2 cos^2(pi x / 2) at x = 0
    CHECK(d.kappa_tilde_sq == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("huge lambda sends everything toward zero") {
    const auto eig = EigenSequence::polynomial(2.0);
    const EffectiveDims d = effective_dims(eig, BasisId::FourierL2, 1e6, {0});
    CHECK(d.kappa_tilde_sq <= 2.0 * eig.tail_weighted(0.0, 0) / 1e6 + 1e-9);
    CHECK(d.kappa_tilde_sq < 1e-5);
  }
  SUBCASE("grid sup never exceeds the analytic bound") {
    for (double lambda : {1e-6, 1e-4, 1e-2}) {
      const EffectiveDims d = effective_dims(EigenSequence::polynomial(2.0, 100.0),
                                             BasisId::FourierL2, lambda, {0, 1});
      for (int k : {0, 1})
        CHECK(d.kappa_tilde_kk_sq.at(k) <=
              d.kappa_tilde_kk_bound.at(k) * (1.0 + 1e-12));
      const EffectiveDims dc = effective_dims(EigenSequence::polynomial(2.0, 100.0),
                                              BasisId::CosineHalf, lambda, {0, 1});
      for (int k : {0, 1})
        CHECK(dc.kappa_tilde_kk_sq.at(k) <=
              dc.kappa_tilde_kk_bound.at(k) * (1.0 + 1e-12));
    }
  }
  SUBCASE("divergent configuration raises a flag instead of truncating silently") {
    // alpha = 2, k = 1: sum i^4 mu_i / (lambda + mu_i) has a non-summable tail
    const EffectiveDims d =
        effective_dims(EigenSequence::polynomial(2.0), BasisId::FourierL2, 1e-3, {1});
    CHECK(d.kappa_hat_diverged.at(1));
    CHECK(std::isinf(d.kappa_hat_k1_sq.at(1)));
    CHECK_FALSE(d.hat01_diverged);
    CHECK_FALSE(d.kappa_tilde_diverged.at(1));
    // alpha = 1: even the k = 1 sup series diverges
    const EffectiveDims d2 =
        effective_dims(EigenSequence::polynomial(1.0), BasisId::FourierL2, 1e-3, {1});
    CHECK(d2.kappa_tilde_diverged.at(1));
  }
  SUBCASE("monotone in lambda") {
    const auto eig = EigenSequence::polynomial(2.0, 10.0);
    EffectiveDims prev = effective_dims(eig, BasisId::FourierL2, 1e-6, {0, 1});
    for (double lambda : {1e-5, 1e-4, 1e-3}) {
      const EffectiveDims d = effective_dims(eig, BasisId::FourierL2, lambda, {0, 1});
      CHECK(d.kappa_tilde_sq <= prev.kappa_tilde_sq);
      CHECK(d.kappa_hat_01_sq <= prev.kappa_hat_01_sq);
      CHECK(d.kappa_tilde_kk_sq.at(1) <= prev.kappa_tilde_kk_sq.at(1));
      prev = d;
    }
  }
  SUBCASE("polynomial-decay slopes match the exact order") {
    for (double alpha : {2.0, 3.0}) {
      const auto eig = EigenSequence::polynomial(alpha, 100.0);
      for (int k : {0, 1}) {
        std::vector<double> lx, ly;
        for (double lambda = 1e-6; lambda <= 1.0001e-2; lambda *= 10.0) {
          const EffectiveDims d = effective_dims(eig, BasisId::FourierL2, lambda, {k});
          lx.push_back(std::log(lambda));
          ly.push_back(std::log(d.kappa_tilde_kk_sq.at(k)));
        }
        const double slope = fit_slope(lx, ly);
        const double target = -(2.0 * k + 1.0) / (2.0 * alpha);
        CHECK_MESSAGE(std::abs(slope - target) <= 0.02,
                      "alpha=" << alpha << " k=" << k << " slope=" << slope);
      }
    }
  }
  SUBCASE("exponential decay grows like log(1/lambda)") {
    const auto eig = EigenSequence::exponential(1.0);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double lambda = 1e-6; lambda <= 1.0001e-3; lambda *= 10.0) {
      const EffectiveDims d = effective_dims(eig, BasisId::CosineHalf, lambda, {0});
      const double ratio = d.kappa_tilde_sq / std::log(1.0 / lambda);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    CHECK(hi / lo <= 1.10);
  }
}

TEST_CASE("population bias decay (regularized approximation)") {
  // sup-grid |f_lambda^(k) - f0^(k)| ~ lambda^{1/2 - k/(2 alpha)} for a
  // boundary-profile truth: log-log slope within 0.05 of 1/2 - k/6 at alpha=3
  const auto eig = EigenSequence::polynomial(3.0, 10.0);
  SeriesFunction f0;
  f0.basis = BasisId::FourierL2;
  f0.coeffs.resize(2000);
  for (std::int64_t i = 1; i <= 2000; ++i)
    f0.coeffs(i - 1) = std::pow(static_cast<double>(i), -4.0);
  const Vector grid = to_vector(linspace(0.0, 1.0, 501));
  for (int k : {0, 1}) {
    std::vector<double> lx, ly;
    std::vector<double> ratio;
    for (double lambda = 1e-6; lambda <= 1.0001e-2; lambda *= 10.0) {
      SeriesFunction diff = f_lambda(f0, eig, lambda);
      diff.coeffs -= f0.coeffs;
      const double sup = series_eval_grid(diff, k, grid).cwiseAbs().maxCoeff();
      lx.push_back(std::log(lambda));
      ly.push_back(std::log(sup));
      ratio.push_back(sup / std::pow(lambda, 0.5 - k / 6.0));
    }
    const double slope = fit_slope(lx, ly);
    const double target = 0.5 - static_cast<double>(k) / 6.0;
    CHECK_MESSAGE(std::abs(slope - target) <= 0.05, "k=" << k << " slope=" << slope);
    // the fitted constant is stable across the sweep
    double rlo = ratio[0], rhi = ratio[0];
    for (double r : ratio) {
      rlo = std::min(rlo, r);
      rhi = std::max(rhi, r);
    }
    CHECK(rhi / rlo < 2.0);
  }
}

TEST_CASE("bound constant") {
  SUBCASE("frozen arithmetic value") {
    CHECK(bound_constant(10000, std::sqrt(5.0)) ==
          doctest::Approx(2.989055465334704).epsilon(1e-12));
  }
  SUBCASE("vanishes with kappa") {
    CHECK(bound_constant(100, 1e-8) < 1e-14);
  }
  SUBCASE("monotone increasing in kappa at fixed n") {
    double prev = 0.0;
    for (double kt : {0.1, 0.5, 1.0, 2.0, 5.0}) {
      const double c = bound_constant(5000, kt);
      CHECK(c > prev);
      prev = c;
    }
  }
  SUBCASE("smallness gate example") {
    CHECK(bound_constant(100000000, 1.0) < 0.5);
  }
}

TEST_CASE("rate schedule") {
  SUBCASE("Holder exponents") {
    const int n = 1000;
    const double ratio = std::log(static_cast<double>(n)) / n;
    const RateSchedule s0 = rate_schedule(FunctionSpace::holder(3.0), 0, n);
    CHECK(s0.lambda_n == doctest::Approx(std::pow(ratio, 6.0 / 7.0)).epsilon(1e-14));
    CHECK(s0.eps_n == doctest::Approx(std::pow(ratio, 3.0 / 7.0)).epsilon(1e-14));
    CHECK(s0.derivative_guarantee);
    const RateSchedule s1 = rate_schedule(FunctionSpace::holder(3.0), 1, n);
    CHECK(s1.lambda_n == s0.lambda_n);  // same lambda for every order
    CHECK(s1.eps_n == doctest::Approx(std::pow(ratio, 2.0 / 7.0)).epsilon(1e-14));
    CHECK(s1.derivative_guarantee);
  }
  SUBCASE("analytic class at n = e^2") {
    const int n = 8;  // closest integer probe first, then exact expressions
    const RateSchedule s = rate_schedule(FunctionSpace::analytic(1.0), 0, n);
    CHECK(s.lambda_n == doctest::Approx(1.0 / 8.0));
    CHECK(s.eps_n == doctest::Approx(std::log(8.0) / std::sqrt(8.0)).epsilon(1e-14));
    // n = e^2 substitution: eps = 2/e (checked on the formula directly)
    const double e2 = std::exp(2.0);
    CHECK(std::log(e2) / std::sqrt(e2) == doctest::Approx(2.0 / std::exp(1.0)).epsilon(1e-14));
  }
  SUBCASE("contract violations") {
    CHECK_THROWS_AS(rate_schedule(FunctionSpace::analytic(1.0), 1, 100), ContractError);
    CHECK_THROWS_AS(rate_schedule(FunctionSpace::holder(3.0), 0, 1), ContractError);
    // k beyond the guarantee regime warns through the flag rather than failing
    const RateSchedule s = rate_schedule(FunctionSpace::holder(2.0), 1, 100);
    CHECK_FALSE(s.derivative_guarantee);
    CHECK(s.eps_n > 0.0);
  }
}
