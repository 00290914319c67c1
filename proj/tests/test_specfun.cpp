#include "zr3b/errors.hpp"
#include "zr3b/specfun.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

using namespace zr3b::specfun;
using std::numbers::pi;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

} // namespace

TEST(BesselK2, MatchesBoostOnLogGrid) {
  for (int k = 0; k <= 400; ++k) {
    const double x = 1e-6 * std::pow(7e8, k / 400.0);
    EXPECT_LE(rel(bessel_k2(x), boost::math::cyl_bessel_k(2, x)), 1e-12) << "x = " << x;
  }
}

TEST(BesselK2, SeriesCrossoverIsSeamless) {
  for (double x : {1.999999, 2.0, 2.000001})
    EXPECT_LE(rel(bessel_k2(x), boost::math::cyl_bessel_k(2, x)), 1e-13);
}

TEST(BesselK2, UnderflowsToZero) {
  EXPECT_EQ(bessel_k2(800.0), 0.0);
  EXPECT_EQ(bessel_k2(1e6), 0.0);
  EXPECT_GT(bessel_k2(700.0), 0.0);
}

TEST(BesselK2, RejectsBadArguments) {
  EXPECT_THROW(bessel_k2(0.0), zr3b::DomainError);
  EXPECT_THROW(bessel_k2(-1.0), zr3b::DomainError);
  EXPECT_THROW(bessel_k2(std::numeric_limits<double>::quiet_NaN()), zr3b::DomainError);
  EXPECT_THROW(bessel_k2(std::numeric_limits<double>::infinity()), zr3b::DomainError);
}

TEST(BesselK2, SmallArgumentAsymptote) {
  // K2(x) ~ 2/x^2 - 1/2
  const double x = 1e-6;
  EXPECT_LE(rel(bessel_k2(x), 2.0 / (x * x) - 0.5), 1e-15);
}

TEST(BesselK2, IsDecreasing) {
  double prev = bessel_k2(1e-3);
  for (int k = 1; k <= 300; ++k) {
    const double x = 1e-3 + 0.1 * k;
    const double v = bessel_k2(x);
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(BesselK1, MatchesBoost) {
  for (int k = 0; k <= 200; ++k) {
    const double x = 1e-5 * std::pow(7e7, k / 200.0);
    EXPECT_LE(rel(bessel_k1(x), boost::math::cyl_bessel_k(1, x)), 1e-12) << "x = " << x;
  }
}

TEST(MacdonaldImagOrder, MatchesTanhSinh) {
  boost::math::quadrature::tanh_sinh<double> ts;
  for (double nu : {0.0, 0.1, 1.0, 3.3, 7.0, 12.0, 20.0}) {
    auto f = [nu](double t) { return std::exp(-std::cosh(t)) * std::cos(nu * t); };
    const double want = ts.integrate(f, 0.0, 8.0);
    EXPECT_NEAR(macdonald_imag_order(nu), want, 1e-13) << "nu = " << nu;
  }
}

TEST(MacdonaldImagOrder, RealOrderZeroAgreesWithK0) {
  EXPECT_NEAR(macdonald_imag_order(0.0), boost::math::cyl_bessel_k(0, 1.0), 1e-15);
}

TEST(MacdonaldImagOrder, IsEven) {
  for (double nu : {0.4, 2.0, 9.5})
    EXPECT_EQ(macdonald_imag_order(nu), macdonald_imag_order(-nu));
  EXPECT_THROW(macdonald_imag_order(std::numeric_limits<double>::infinity()),
               zr3b::DomainError);
}

TEST(Symbol, ValueAtZero) {
  // sqrt(3)/2 - 2 pi/3
  EXPECT_NEAR(symbol_S(0.0, {0.0}), -1.2283696986087567, 1e-15);
  const double gc = 4.0 / 3.0 - std::numbers::sqrt3 / pi;
  for (double g : {0.0, 0.5, gc, 1.0, 2.0})
    EXPECT_NEAR(symbol_S(0.0, {g}), 0.5 * pi * (g - gc), 1e-12);
  EXPECT_NEAR(symbol_S(0.0, {gc}), 0.0, 1e-14);
}

TEST(Symbol, ContinuousAtZero) {
  for (double g : {0.0, 1.0, 3.0})
    for (double x : {1e-9, 1e-7, 1e-5, 1e-3})
      EXPECT_NEAR(symbol_S(x, {g}), symbol_S(0.0, {g}), 10.0 * x * x + 1e-14);
}

TEST(Symbol, MatchesDirectFormula) {
  for (double g : {0.0, 0.7, 2.5})
    for (double x : {0.01, 0.3, 1.0, 4.0, 15.0}) {
      const double direct = std::numbers::sqrt3 / 2.0 +
                            (g * std::sinh(pi * x / 2) - 4.0 * std::sinh(pi * x / 6)) /
                                (x * std::cosh(pi * x / 2));
      EXPECT_NEAR(symbol_S(x, {g}), direct, 1e-14);
    }
}

TEST(Symbol, IsEvenAndTendsToConstant) {
  for (double x : {0.2, 3.0, 11.0})
    EXPECT_EQ(symbol_S(x, {0.9}), symbol_S(-x, {0.9}));
  EXPECT_NEAR(symbol_S(100.0, {0.0}), std::numbers::sqrt3 / 2.0, 1e-4);
  EXPECT_NEAR(symbol_S(1e4, {5.0}), std::numbers::sqrt3 / 2.0, 1e-3);
  EXPECT_TRUE(std::isfinite(symbol_S(1e300, {1.0})));
}

TEST(Symbol, SplitsIntoWeights) {
  for (double x : {1e-8, 0.5, 6.0, 40.0})
    EXPECT_NEAR(symbol_S(x, {1.3}),
                std::numbers::sqrt3 / 2.0 + weight_reg(x, 1.3) + weight_off(x), 1e-14);
  EXPECT_NEAR(weight_off(0.0), -2.0 * pi / 3.0, 1e-15);
  EXPECT_NEAR(weight_reg(0.0, 1.0), pi / 2.0, 1e-15);
}

TEST(Symbol, RejectsNonFinite) {
  EXPECT_THROW(symbol_S(std::numeric_limits<double>::quiet_NaN(), {0.0}), zr3b::DomainError);
  EXPECT_THROW(symbol_S(1.0, {std::numeric_limits<double>::infinity()}), zr3b::DomainError);
}
