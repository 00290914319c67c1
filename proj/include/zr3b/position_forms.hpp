#pragma once

#include "zr3b/charges.hpp"
#include "zr3b/momentum_forms.hpp"
#include "zr3b/quadrature.hpp"

namespace zr3b::forms {

struct PositionFormBreakdown {
  double diag_l2 = 0.0;         // 12 pi sqrt(lambda) ||xi||^2
  double diag_gagliardo = 0.0;  // K_2 difference term of the diagonal part
  double off_negative = 0.0;    // Yukawa-weighted singular term, <= 0
  double off_positive = 0.0;    // K_2 difference term of the off part, >= 0
  double reg = 0.0;
  double err_estimate = 0.0;

  double diag() const { return diag_l2 + diag_gagliardo; }
  double off() const { return off_negative + off_positive; }
};

/// 12 pi sqrt(lambda) ||xi||^2
///   + (2 sqrt3 lambda / pi) int int |xi(x) - xi(y)|^2 K2(k |x-y|)/|x-y|^2,
/// k = sqrt(4 lambda / 3). Requires lambda > 0.
quad::QuadResult phi_diag_position(const charges::RadialCharge &f, double lambda,
                                   const quad::QuadratureSpec &spec);

/// -(8 sqrt3 lambda / pi) int int xi(x) xi(y) K2(k sqrt(Q))/Q,
/// Q = x^2 + y^2 + x.y. Q vanishes only at the origin, so the kernel is
/// bounded away from it.
quad::QuadResult phi_off_position(const charges::RadialCharge &f, double lambda,
                                  const quad::QuadratureSpec &spec);

struct OffDecomposition {
  quad::QuadResult negative; // -24 pi int e^{-sqrt(lambda)|x|} |xi|^2 / |x|
  quad::QuadResult positive; // (4 sqrt3 lambda/pi) int int |xi(x)-xi(y)|^2 K2(k sqrt Q)/Q
};
OffDecomposition phi_off_decomposed(const charges::RadialCharge &f,
                                    double lambda,
                                    const quad::QuadratureSpec &spec);

/// |LHS - RHS| of
///   (lambda/(sqrt3 pi^2)) int d^3x K2(k sqrt Q)/Q = e^{-sqrt(lambda) y}/y,
/// Q = y^2 + x^2 + x.y, with the left side reduced to radius and cosine.
double yukawa_identity_residual(double lambda, double y,
                                const quad::QuadratureSpec &spec);

/// 48 pi^2 gamma int y |xi(y)|^2 dy
quad::QuadResult phi_reg_position(const charges::RadialCharge &f, double gamma,
                                  const quad::QuadratureSpec &spec);

struct HardyRellich {
  double lhs = 0.0; // int |xi|^2 / |x|
  double rhs = 0.0; // (pi/2) int |k| |f(k)|^2 = [xi]^2 / (4 pi)
  double gap() const { return rhs - lhs; }
};
HardyRellich hardy_rellich(const charges::RadialCharge &f,
                           const quad::QuadratureSpec &spec);
double hardy_rellich_gap(const charges::RadialCharge &f,
                         const quad::QuadratureSpec &spec);

struct SandwichBounds {
  double lower = 0.0;
  double upper = 0.0;
  double value = 0.0;
  FormBreakdown breakdown;
  bool holds() const { return lower <= value && value <= upper; }
};

/// lower = diag + 3 min{0, gamma - 2} [xi]^2 + zero
/// upper = diag + (3 gamma + 96 sqrt3/pi) [xi]^2 + zero
/// value = phi_total. The zero part enters both bounds unchanged.
SandwichBounds sandwich_bounds(const charges::RadialCharge &f,
                               const FormParams &params,
                               const quad::QuadratureSpec &spec);

/// Dense-grid infimum of beta(y) on (0, max(10 b, support)], the theta
/// breakpoints, and the tail value -1/a.
double essinf_beta(const FormParams &params);

/// Lambda above which the position-space bound certifies positivity.
class LambdaThreshold {
public:
  static LambdaThreshold finite(double value);
  static LambdaThreshold unbounded();

  bool is_finite() const { return m_finite; }
  /// Throws DomainError for the unbounded sentinel.
  double value() const;
  /// lambda > threshold; always false for the unbounded sentinel.
  bool exceeded_by(double lambda) const;

private:
  LambdaThreshold(bool finite, double value) : m_finite(finite), m_value(value) {}
  bool m_finite;
  double m_value;
};

/// 3 min{0, essinf beta}^2 / (3 - pi^2 max{0, 2 - gamma}^2) for
/// gamma > 2 - sqrt3/pi, unbounded otherwise.
LambdaThreshold coercive_lambda_threshold(const FormParams &params);

} // namespace zr3b::forms
