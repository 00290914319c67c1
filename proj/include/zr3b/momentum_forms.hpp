#pragma once

#include "zr3b/charges.hpp"
#include "zr3b/quadrature.hpp"

namespace zr3b::forms {

struct FormParams {
  double gamma = 0.0;                 // three-body strength, >= 0
  double lambda = 0.0;                // spectral shift, >= 0
  double inv_scattering_length = 0.0; // 1/a; 0 means |a| = infinity
  charges::ThetaProfile theta = charges::ThetaProfile::indicator(1.0);

  void validate() const; // throws DomainError
};

struct FormBreakdown {
  double diag = 0.0;
  double off = 0.0;
  double reg = 0.0;
  double zero = 0.0;
  double total = 0.0; // diag + off + reg + zero
  double err_estimate = 0.0;
};

/// 48 pi^2 int p^2 sqrt(3p^2/4 + lambda) |f(p)|^2 dp
quad::QuadResult phi_diag(const charges::RadialCharge &f, double lambda,
                          const quad::QuadratureSpec &spec);

/// -96 pi int int p q f(p) f(q) ln((p^2+q^2+pq+lambda)/(p^2+q^2-pq+lambda)).
/// The lambda kernel is the angular integral of 1/(p^2+q^2+pq u+lambda)
/// over u in [-1, 1], i.e. ln((A + pq)/(A - pq))/(pq) with A = p^2+q^2+lambda.
quad::QuadResult phi_off(const charges::RadialCharge &f, double lambda,
                         const quad::QuadratureSpec &spec);

/// 24 pi gamma int int p q f(p) f(q) ln((p+q)^2/(p-q)^2)
quad::QuadResult phi_reg(const charges::RadialCharge &f, double gamma,
                         const quad::QuadratureSpec &spec);

/// beta(y) = -1/a + gamma (theta(y) - 1)/y
double beta_function(double y, const FormParams &params);

/// 48 pi^2 int y^2 beta(y) |xi(y)|^2 dy
quad::QuadResult phi_zero(const charges::RadialCharge &f,
                          const FormParams &params,
                          const quad::QuadratureSpec &spec);

FormBreakdown phi_total(const charges::RadialCharge &f, const FormParams &params,
                        const quad::QuadratureSpec &spec);

struct DiagonalizedBreakdown {
  double diag = 0.0;
  double off = 0.0;
  double reg = 0.0;
  double err_estimate = 0.0; // trapezoid vs. half-resolution trapezoid
};

/// lambda = 0 components as 48 pi^2 int |f^#(x)|^2 w(x) dx.
DiagonalizedBreakdown phi_diagonalized(const charges::MellinProfile &profile,
                                       double gamma);
DiagonalizedBreakdown phi_diagonalized(const charges::RadialCharge &f,
                                       double gamma,
                                       const quad::QuadratureSpec &spec);

/// 48 pi^2 int |f^#(x)|^2 S(x) dx on the sampled profile.
double symbol_integral(const charges::MellinProfile &profile, double gamma);

} // namespace zr3b::forms
