#pragma once

namespace zr3b::specfun {

struct SymbolParams {
  double gamma = 0.0; // three-body regularization strength, >= 0
};

//! Macdonald function K_2(x) for x > 0.
/*! Power series for x <= 2 and a trapezoidal sum of the integral
    representation int_0^inf exp(-x cosh t) cosh(2t) dt above. Returns exactly
    0 once the result would fall below the smallest normal double. */
double bessel_k2(double x);

//! K_1(x); used by the analytic angular reduction checks in tests.
double bessel_k1(double x);

//! K_{i nu}(1) = int_0^inf exp(-cosh t) cos(nu t) dt. Even in nu.
double macdonald_imag_order(double nu);

//! Stability symbol
//!   S(x) = sqrt(3)/2 + (gamma sinh(pi x/2) - 4 sinh(pi x/6)) / (x cosh(pi x/2)).
//! Uses the analytic value at x = 0 and short Taylor forms of the two
//! hyperbolic ratios very close to it.
double symbol_S(double x, const SymbolParams &p);

/// S(0) = sqrt(3)/2 - 2 pi/3 + pi gamma/2.
double symbol_S_at_zero(const SymbolParams &p);

/// Mellin-side multipliers of the three lambda = 0 form components.
double weight_off(double x);             // -4 sinh(pi x/6) / (x cosh(pi x/2))
double weight_reg(double x, double gamma); // gamma tanh(pi x/2) / x

} // namespace zr3b::specfun
