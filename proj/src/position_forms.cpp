#include "zr3b/position_forms.hpp"

#include "zr3b/errors.hpp"
#include "zr3b/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace zr3b::forms {

using std::numbers::pi;
using std::numbers::sqrt3;

namespace {

constexpr int essinf_grid_points = 100000;

void require_positive_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw DomainError("position-space forms need lambda > 0");
}

double kappa(double lambda) { return std::sqrt(4.0 * lambda / 3.0); }

// K2(k r)/r^2 as a function of r^2, with the small-argument form built into
// bessel_k2.
double k2_over_r2(double k, double r2) {
  if (!(r2 > 0.0))
    return 0.0;
  return specfun::bessel_k2(k * std::sqrt(r2)) / r2;
}

// Radius-memoizing view of xi for the pair integrals: the cosine integral
// calls the integrand many times at fixed (x, y).
struct CachedProfile {
  const charges::RadialCharge &f;
  mutable double last_arg = std::numeric_limits<double>::quiet_NaN();
  mutable double last_val = 0.0;
  double operator()(double r) const {
    if (r != last_arg) {
      last_arg = r;
      last_val = f.position(r);
    }
    return last_val;
  }
};

// Window for difference kernels: one radius may leave the charge support
// while the kernel still couples it to the other one.
quad::Window difference_window(const charges::RadialCharge &f, double k) {
  const auto w = f.position_window();
  return {w.lo, std::max(w.hi, std::log(std::exp(w.hi) + 60.0 / k))};
}

quad::QuadResult scaled(quad::QuadResult r, double factor) {
  r.value *= factor;
  r.err_estimate *= std::abs(factor);
  return r;
}

// int y^k |xi(y)|^2 dy over the position window (log variable).
quad::QuadResult position_moment(const charges::RadialCharge &f, int k,
                                 const quad::QuadratureSpec &spec,
                                 double decay = 0.0) {
  const auto w = f.position_window();
  auto integrand = [&](double u) {
    const double y = std::exp(u);
    const double v = f.position(y);
    return std::pow(y, k + 1) * std::exp(-decay * y) * v * v;
  };
  return quad::integrate_interval(integrand, w.lo, w.hi, spec);
}

quad::QuadResult off_positive_part(const charges::RadialCharge &f,
                                   double lambda,
                                   const quad::QuadratureSpec &spec) {
  const double k = kappa(lambda);
  CachedProfile xi_x{f}, xi_y{f};
  auto F = [&](double x, double y, double u) {
    const double d = xi_x(x) - xi_y(y);
    return d * d * k2_over_r2(k, x * x + y * y + x * y * u);
  };
  return scaled(quad::integrate_radial_pair(F, difference_window(f, k), spec),
                4.0 * sqrt3 * lambda / pi);
}

} // namespace

quad::QuadResult phi_diag_position(const charges::RadialCharge &f, double lambda,
                                   const quad::QuadratureSpec &spec) {
  require_positive_lambda(lambda);
  const double k = kappa(lambda);
  const auto l2 = scaled(position_moment(f, 2, spec), 48.0 * pi * pi * std::sqrt(lambda));

  CachedProfile xi_x{f}, xi_y{f};
  auto F = [&](double x, double y, double u) {
    const double d = xi_x(x) - xi_y(y);
    if (d == 0.0)
      return 0.0;
    // |x - y|^2 = (x - y)^2 + 2 x y (1 - u)
    const double r2 = (x - y) * (x - y) + 2.0 * x * y * (1.0 - u);
    return d * d * k2_over_r2(k, r2);
  };
  const auto gag = scaled(quad::integrate_radial_pair(F, difference_window(f, k), spec),
                          2.0 * sqrt3 * lambda / pi);
  quad::QuadResult out;
  out.value = l2.value + gag.value;
  out.err_estimate = l2.err_estimate + gag.err_estimate;
  out.evaluations = l2.evaluations + gag.evaluations;
  return out;
}

quad::QuadResult phi_off_position(const charges::RadialCharge &f, double lambda,
                                  const quad::QuadratureSpec &spec) {
  require_positive_lambda(lambda);
  const double k = kappa(lambda);
  CachedProfile xi_x{f}, xi_y{f};
  auto F = [&](double x, double y, double u) {
    return xi_x(x) * xi_y(y) * k2_over_r2(k, x * x + y * y + x * y * u);
  };
  return scaled(quad::integrate_radial_pair(F, f.position_window(), spec),
                -8.0 * sqrt3 * lambda / pi);
}

OffDecomposition phi_off_decomposed(const charges::RadialCharge &f,
                                    double lambda,
                                    const quad::QuadratureSpec &spec) {
  require_positive_lambda(lambda);
  OffDecomposition out;
  // -24 pi int e^{-sqrt(lambda) x} |xi|^2 / x d^3x = -96 pi^2 int x e^{..} xi^2 dx
  out.negative = scaled(position_moment(f, 1, spec, std::sqrt(lambda)), -96.0 * pi * pi);
  out.positive = off_positive_part(f, lambda, spec);
  return out;
}

double yukawa_identity_residual(double lambda, double y,
                                const quad::QuadratureSpec &spec) {
  require_positive_lambda(lambda);
  if (!(y > 0.0) || !std::isfinite(y))
    throw DomainError("Yukawa identity needs y > 0");
  const double k = kappa(lambda);
  const quad::QuadratureSpec inner = spec.tightened(0.1);
  // 2 pi int x^2 dx int du K2(k sqrt Q)/Q, x = e^t
  auto radial = [&](double t) {
    const double x = std::exp(t);
    auto angular = [&](double u) { return k2_over_r2(k, y * y + x * x + x * y * u); };
    return x * x * x * quad::integrate_cosine(angular, inner).value;
  };
  const double lo = std::log(y) - 40.0;
  const double hi = std::log(y + 80.0 / k);
  const double integral = 2.0 * pi * quad::integrate_interval(radial, lo, hi, spec).value;
  const double lhs = lambda / (sqrt3 * pi * pi) * integral;
  const double rhs = std::exp(-std::sqrt(lambda) * y) / y;
  return std::abs(lhs - rhs);
}

quad::QuadResult phi_reg_position(const charges::RadialCharge &f, double gamma,
                                  const quad::QuadratureSpec &spec) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma))
    throw DomainError("gamma must be finite and non-negative");
  if (gamma == 0.0)
    return {};
  return scaled(position_moment(f, 1, spec), 48.0 * pi * pi * gamma);
}

HardyRellich hardy_rellich(const charges::RadialCharge &f,
                           const quad::QuadratureSpec &spec) {
  HardyRellich out;
  out.lhs = 4.0 * pi * position_moment(f, 1, spec).value;
  out.rhs = charges::gagliardo_seminorm_sq(f, spec) / (4.0 * pi);
  return out;
}

double hardy_rellich_gap(const charges::RadialCharge &f,
                         const quad::QuadratureSpec &spec) {
  return hardy_rellich(f, spec).gap();
}

SandwichBounds sandwich_bounds(const charges::RadialCharge &f,
                               const FormParams &params,
                               const quad::QuadratureSpec &spec) {
  params.validate();
  require_positive_lambda(params.lambda);
  SandwichBounds out;
  out.breakdown = phi_total(f, params, spec);
  const double seminorm = charges::gagliardo_seminorm_sq(f, spec);
  const double base = out.breakdown.diag + out.breakdown.zero;
  out.lower = base + 3.0 * std::min(0.0, params.gamma - 2.0) * seminorm;
  out.upper = base + (3.0 * params.gamma + 96.0 * sqrt3 / pi) * seminorm;
  out.value = out.breakdown.total;
  return out;
}

double essinf_beta(const FormParams &params) {
  params.validate();
  const double b = params.theta.b();
  const double top = std::max(10.0 * b, params.theta.support());
  double inf = -params.inv_scattering_length; // tail limit, theta = 0 far out
  for (int i = 1; i <= essinf_grid_points; ++i)
    inf = std::min(inf, beta_function(top * i / essinf_grid_points, params));
  for (double s : params.theta.breakpoints())
    inf = std::min(inf, beta_function(s, params));
  return inf;
}

LambdaThreshold LambdaThreshold::finite(double value) {
  return LambdaThreshold(true, value);
}

LambdaThreshold LambdaThreshold::unbounded() {
  return LambdaThreshold(false, 0.0);
}

double LambdaThreshold::value() const {
  if (!m_finite)
    throw DomainError("lambda threshold is unbounded for this gamma");
  return m_value;
}

bool LambdaThreshold::exceeded_by(double lambda) const {
  return m_finite && lambda > m_value;
}

LambdaThreshold coercive_lambda_threshold(const FormParams &params) {
  params.validate();
  if (params.gamma <= 2.0 - sqrt3 / pi)
    return LambdaThreshold::unbounded();
  const double m = std::min(0.0, essinf_beta(params));
  const double g = std::max(0.0, 2.0 - params.gamma);
  return LambdaThreshold::finite(3.0 * m * m / (3.0 - pi * pi * g * g));
}

} // namespace zr3b::forms
