#include "zr3b/errors.hpp"
#include "zr3b/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

using namespace zr3b::quad;
using std::numbers::pi;

TEST(Interval, SmoothIntegrals) {
  QuadratureSpec spec;
  EXPECT_NEAR(integrate_interval([](double x) { return std::sin(x); }, 0, pi, spec).value, 2.0,
              1e-13);
  EXPECT_NEAR(integrate_interval([](double x) { return x * x * x; }, -1, 2, spec).value, 3.75,
              1e-13);
  const auto r = integrate_interval([](double x) { return std::exp(x); }, 1, 0, spec);
  EXPECT_NEAR(r.value, -(std::exp(1.0) - 1.0), 1e-13);
}

TEST(Interval, NeverTouchesEndpoints) {
  auto f = [](double x) {
    if (x <= 0.0 || x >= 1.0)
      throw std::logic_error("endpoint evaluated");
    return 1.0 / std::sqrt(x);
  };
  QuadratureSpec spec;
  EXPECT_NEAR(integrate_interval(f, 0, 1, spec).value, 2.0, 1e-8);
}

TEST(Interval, LogSingularity) {
  QuadratureSpec spec;
  const auto r = integrate_interval([](double x) { return std::log(x); }, 0, 1, spec);
  EXPECT_NEAR(r.value, -1.0, 1e-9);
  EXPECT_GT(r.evaluations, 0u);
}

TEST(Interval, TanhSinhScheme) {
  QuadratureSpec spec;
  spec.scheme = Scheme::double_exponential;
  EXPECT_NEAR(integrate_interval([](double x) { return std::log(x); }, 0, 1, spec).value, -1.0,
              1e-12);
  EXPECT_NEAR(integrate_interval([](double x) { return std::log(x); }, 1, 0, spec).value, 1.0,
              1e-12);
}

TEST(Interval, BudgetExhaustionCarriesEstimate) {
  QuadratureSpec spec;
  spec.max_subdivisions = 2;
  spec.rel_tol = 1e-14;
  spec.abs_tol = 1e-16;
  auto f = [](double x) { return std::sin(1.0 / x); };
  try {
    integrate_interval(f, 1e-3, 1.0, spec);
    FAIL() << "expected ConvergenceError";
  } catch (const zr3b::ConvergenceError &e) {
    EXPECT_TRUE(std::isfinite(e.best_estimate()));
    EXPECT_GT(e.error_estimate(), 0.0);
  }
}

TEST(Interval, RejectsBadInput) {
  QuadratureSpec spec;
  auto one = [](double) { return 1.0; };
  EXPECT_THROW(integrate_interval(one, 0, INFINITY, spec), zr3b::DomainError);
  spec.rel_tol = 0;
  EXPECT_THROW(integrate_interval(one, 0, 1, spec), zr3b::DomainError);
  QuadratureSpec s2;
  s2.max_subdivisions = 0;
  EXPECT_THROW(s2.validate(), zr3b::DomainError);
  QuadratureSpec s3;
  s3.truncation_radius = -1;
  EXPECT_THROW(s3.validate(), zr3b::DomainError);
}

TEST(Spec, Tightened) {
  QuadratureSpec spec;
  const auto t = spec.tightened(0.1);
  EXPECT_DOUBLE_EQ(t.rel_tol, 1e-9);
  EXPECT_DOUBLE_EQ(t.abs_tol, 1e-11);
  EXPECT_EQ(t.max_subdivisions, spec.max_subdivisions);
}

TEST(Semiaxis, ExponentialAndGamma) {
  QuadratureSpec spec;
  EXPECT_NEAR(integrate_semiaxis([](double x) { return std::exp(-x); }, spec).value, 1.0, 1e-10);
  // Gamma(1/2), endpoint singularity
  EXPECT_NEAR(integrate_semiaxis([](double x) { return std::exp(-x) / std::sqrt(x); }, spec).value,
              std::sqrt(pi), 1e-9);
  // spread over decades: int_0^inf dx / (1 + x)^2 up to R = 60
  EXPECT_NEAR(integrate_semiaxis([](double x) { return 1.0 / ((1 + x) * (1 + x)); }, spec).value,
              60.0 / 61.0, 1e-10);
}

TEST(Semiaxis, ExplicitWindow) {
  QuadratureSpec spec;
  const auto r = integrate_semiaxis([](double x) { return x * std::exp(-x * x); },
                                    Window{-30, std::log(12.0)}, spec);
  EXPECT_NEAR(r.value, 0.5, 1e-10);
}

TEST(SquareLogDiag, UnitSquare) {
  QuadratureSpec spec;
  auto K = [](double p, double q) { return std::log(std::abs(p - q)); };
  EXPECT_NEAR(integrate_square_logdiag(K, 0, 1, spec).value, -1.5, 1e-9);
}

TEST(SquareLogDiag, HalfLineLaplaceDifference) {
  // p - q of two unit exponentials has density e^{-|d|}/2, so the mean of
  // ln|p - q| is int_0^inf e^{-d} ln d = -Euler gamma.
  QuadratureSpec spec;
  auto K = [](double p, double q) { return std::exp(-p - q) * std::log(std::abs(p - q)); };
  EXPECT_NEAR(integrate_square_logdiag(K, spec).value, -0.57721566490153286, 1e-8);
}

TEST(SquareLogDiag, SmoothKernelInLogWindow) {
  QuadratureSpec spec;
  auto K = [](double p, double q) { return std::exp(-p) * std::exp(-2 * q); };
  EXPECT_NEAR(integrate_square_logdiag(K, Window{-40, std::log(60.0)}, spec).value, 0.5, 1e-10);
}

TEST(RadialPair, FactorizedGaussian) {
  QuadratureSpec spec;
  auto F = [](double x, double y, double) { return std::exp(-x * x - y * y); };
  EXPECT_LE(std::abs(integrate_radial_pair(F, spec).value / std::pow(pi, 3) - 1.0), 1e-9);
}

TEST(RadialPair, CoupledGaussian) {
  // exp(-x^2 - y^2 - |x - y|^2): quadratic form [[2,-1],[-1,2]] per axis, det 3
  QuadratureSpec spec;
  auto F = [](double x, double y, double u) {
    return std::exp(-x * x - y * y - (x * x + y * y - 2 * x * y * u));
  };
  const double want = std::pow(pi, 3) / std::pow(3.0, 1.5);
  EXPECT_LE(std::abs(integrate_radial_pair(F, spec).value / want - 1.0), 1e-9);
}

TEST(Cosine, PolynomialAndNearSingular) {
  QuadratureSpec spec;
  EXPECT_NEAR(integrate_cosine([](double u) { return u * u; }, spec).value, 2.0 / 3.0, 1e-12);
  const double a = 1.0 + 1e-6;
  EXPECT_LE(std::abs(integrate_cosine([a](double u) { return 1.0 / (a - u); }, spec).value /
                         std::log((a + 1) / (a - 1)) -
                     1.0),
            1e-10);
}
