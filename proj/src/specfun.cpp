#include "zr3b/specfun.hpp"

#include "zr3b/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace zr3b::specfun {

namespace {

constexpr double euler_gamma = 0.57721566490153286061;

// Below this the integral representation needs too many nodes; above it the
// power series starts to lose digits to cancellation.
constexpr double series_crossover = 2.0;

// Trapezoidal rule for int_0^inf exp(-x (cosh t - 1)) cosh(nu t) dt. The
// integrand is analytic in |Im t| < pi/2; for large x its width shrinks like
// x^-1/2, so the step follows it.
double scaled_k_integral(double x, int nu) {
  const double h = std::min(0.2, 0.7 / std::sqrt(x));
  double sum = 0.5; // t = 0 node, half weight
  for (int k = 1;; ++k) {
    const double t = k * h;
    const double s = std::sinh(0.5 * t);
    const double arg = 2.0 * x * s * s; // x (cosh t - 1), no cancellation
    if (arg > 48.0)
      break;
    sum += std::exp(-arg) * std::cosh(nu * t);
  }
  return h * sum;
}

double k2_series(double x) {
  const double half = 0.5 * x;
  const double q = half * half;
  const double log_half = std::log(half);
  // term_k = (x/2)^{2k+2} / (k! (k+2)!)
  double term = q / 2.0;
  double harmonic_k = 0.0;        // H_k
  double harmonic_k2 = 1.0 + 0.5; // H_{k+2}
  double sum = 0.0;
  for (int k = 0; k < 60; ++k) {
    const double psi_sum = -2.0 * euler_gamma + harmonic_k + harmonic_k2;
    const double contrib = term * (-log_half + 0.5 * psi_sum);
    sum += contrib;
    if (std::abs(contrib) < 1e-18 * std::abs(sum) && k > 2)
      break;
    term *= q / ((k + 1.0) * (k + 3.0));
    harmonic_k += 1.0 / (k + 1.0);
    harmonic_k2 += 1.0 / (k + 3.0);
  }
  return 2.0 / (x * x) - 0.5 + sum;
}

double k1_series(double x) {
  const double half = 0.5 * x;
  const double q = half * half;
  const double log_half = std::log(half);
  // term_k = (x/2)^{2k+1} / (k! (k+1)!)
  double term = half;
  double harmonic_k = 0.0;
  double harmonic_k1 = 1.0;
  double sum = 0.0;
  for (int k = 0; k < 60; ++k) {
    const double psi_sum = -2.0 * euler_gamma + harmonic_k + harmonic_k1;
    const double contrib = term * (log_half - 0.5 * psi_sum);
    sum += contrib;
    if (std::abs(contrib) < 1e-18 * std::abs(sum) && k > 2)
      break;
    term *= q / ((k + 1.0) * (k + 2.0));
    harmonic_k += 1.0 / (k + 1.0);
    harmonic_k1 += 1.0 / (k + 2.0);
  }
  return 1.0 / x + sum;
}

void require_positive_finite(double x, const char *who) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw DomainError(std::string(who) + ": argument must be positive and finite");
}

double flush_underflow(double v) {
  return v < std::numeric_limits<double>::min() ? 0.0 : v;
}

} // namespace

double bessel_k2(double x) {
  require_positive_finite(x, "bessel_k2");
  if (x < 1e-4)
    return 2.0 / (x * x) - 0.5; // next term is O(x^2 ln x)
  if (x <= series_crossover)
    return k2_series(x);
  if (x > 750.0)
    return 0.0;
  return flush_underflow(scaled_k_integral(x, 2) * std::exp(-x));
}

double bessel_k1(double x) {
  require_positive_finite(x, "bessel_k1");
  if (x <= series_crossover)
    return k1_series(x);
  if (x > 750.0)
    return 0.0;
  return flush_underflow(scaled_k_integral(x, 1) * std::exp(-x));
}

double macdonald_imag_order(double nu) {
  if (!std::isfinite(nu))
    throw DomainError("macdonald_imag_order: order must be finite");
  nu = std::abs(nu);
  // Aliasing error of the trapezoidal rule is ~exp(-(pi/2)(2 pi/h - nu)).
  const double h = std::min(0.2, 2.0 * std::numbers::pi / (nu + 30.0));
  // exp(-cosh 5.2) ~ 1e-39
  const int nodes = static_cast<int>(std::ceil(5.2 / h));
  double sum = 0.5 * std::exp(-1.0);
  for (int k = 1; k <= nodes; ++k) {
    const double t = k * h;
    sum += std::exp(-std::cosh(t)) * std::cos(nu * t);
  }
  return h * sum;
}

double symbol_S_at_zero(const SymbolParams &p) {
  return std::numbers::sqrt3 / 2.0 - 2.0 * std::numbers::pi / 3.0 +
         0.5 * std::numbers::pi * p.gamma;
}

double weight_off(double x) {
  using std::numbers::pi;
  const double u = std::abs(x) * pi / 2.0; // ratio is even in x
  if (u < 1e-6) {
    // -4 (pi/6)(1 + (u/3)^2/6) / (1 + u^2/2) / (2u/pi) expanded
    return -2.0 * pi / 3.0 * (1.0 + u * u * (1.0 / 54.0 - 0.5));
  }
  double ratio; // sinh(u/3) / cosh(u)
  if (u > 20.0) {
    const double e = std::exp(-2.0 * u / 3.0);
    ratio = e * (1.0 - e) / (1.0 + std::exp(-2.0 * u));
  } else {
    ratio = std::sinh(u / 3.0) / std::cosh(u);
  }
  return -4.0 * ratio / std::abs(x);
}

double weight_reg(double x, double gamma) {
  using std::numbers::pi;
  const double u = std::abs(x) * pi / 2.0;
  if (u < 1e-6)
    return gamma * pi / 2.0 * (1.0 - u * u / 3.0);
  return gamma * std::tanh(u) / std::abs(x);
}

double symbol_S(double x, const SymbolParams &p) {
  if (!std::isfinite(x) || !std::isfinite(p.gamma))
    throw DomainError("symbol_S: non-finite input");
  if (x == 0.0)
    return symbol_S_at_zero(p);
  return std::numbers::sqrt3 / 2.0 + weight_reg(x, p.gamma) + weight_off(x);
}

} // namespace zr3b::specfun
