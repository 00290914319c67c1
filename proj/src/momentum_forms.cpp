#include "zr3b/momentum_forms.hpp"

#include "zr3b/errors.hpp"
#include "zr3b/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace zr3b::forms {

using std::numbers::pi;

namespace {

// G(t) = e^{2t} f(e^t); with p = e^t, p q f(p) f(q) dp dq = G(t) G(s) dt ds.
double weight_G(const charges::RadialCharge &f, double t) {
  return std::exp(2.0 * t) * f.momentum(std::exp(t));
}

// ln((A + pq)/(A - pq)) with A = p^2 + q^2 + lambda, written through
// tau = t - s so that nothing cancels when one momentum dominates.
double off_kernel(double t, double s, double lambda) {
  const double tau = t - s;
  const double denom = 2.0 * std::cosh(tau) - 1.0 + lambda * std::exp(-(t + s));
  return std::log1p(2.0 / denom);
}

// ln((p+q)^2/(p-q)^2) = 2 ln((1 + r)/(1 - r)), r = e^{-|t-s|}.
double reg_kernel(double t, double s) {
  const double a = std::abs(t - s);
  const double one_minus_r = -std::expm1(-a);
  const double r = std::exp(-a);
  return 2.0 * std::log1p(2.0 * r / one_minus_r);
}

void require_nonneg(double v, const char *what) {
  if (!(v >= 0.0) || !std::isfinite(v))
    throw DomainError(std::string(what) + " must be finite and non-negative");
}

quad::QuadResult scaled(quad::QuadResult r, double factor) {
  r.value *= factor;
  r.err_estimate *= std::abs(factor);
  return r;
}

} // namespace

void FormParams::validate() const {
  require_nonneg(gamma, "gamma");
  require_nonneg(lambda, "lambda");
  if (!std::isfinite(inv_scattering_length))
    throw DomainError("1/a must be finite");
}

quad::QuadResult phi_diag(const charges::RadialCharge &f, double lambda,
                          const quad::QuadratureSpec &spec) {
  require_nonneg(lambda, "lambda");
  const auto w = f.momentum_window();
  auto integrand = [&](double t) {
    const double p = std::exp(t);
    const double v = f.momentum(p);
    return p * p * p * std::sqrt(0.75 * p * p + lambda) * v * v;
  };
  return scaled(quad::integrate_interval(integrand, w.lo, w.hi, spec),
                48.0 * pi * pi);
}

quad::QuadResult phi_off(const charges::RadialCharge &f, double lambda,
                         const quad::QuadratureSpec &spec) {
  require_nonneg(lambda, "lambda");
  auto K = [&](double t, double s) {
    return weight_G(f, t) * weight_G(f, s) * off_kernel(t, s, lambda);
  };
  const auto w = f.momentum_window();
  return scaled(quad::integrate_square_logdiag(K, w.lo, w.hi, spec), -96.0 * pi);
}

quad::QuadResult phi_reg(const charges::RadialCharge &f, double gamma,
                         const quad::QuadratureSpec &spec) {
  require_nonneg(gamma, "gamma");
  if (gamma == 0.0)
    return {};
  auto K = [&](double t, double s) {
    return weight_G(f, t) * weight_G(f, s) * reg_kernel(t, s);
  };
  const auto w = f.momentum_window();
  return scaled(quad::integrate_square_logdiag(K, w.lo, w.hi, spec),
                24.0 * pi * gamma);
}

double beta_function(double y, const FormParams &params) {
  return -params.inv_scattering_length +
         params.gamma * (params.theta(y) - 1.0) / y;
}

quad::QuadResult phi_zero(const charges::RadialCharge &f,
                          const FormParams &params,
                          const quad::QuadratureSpec &spec) {
  params.validate();
  const auto w = f.position_window();
  quad::QuadResult out;

  if (params.inv_scattering_length != 0.0) {
    auto l2 = [&](double u) {
      const double y = std::exp(u);
      const double v = f.position(y);
      return y * y * y * v * v;
    };
    const auto r = quad::integrate_interval(l2, w.lo, w.hi, spec);
    out.value -= params.inv_scattering_length * r.value;
    out.err_estimate += std::abs(params.inv_scattering_length) * r.err_estimate;
    out.evaluations += r.evaluations;
  }

  if (params.gamma != 0.0) {
    // gamma int y (theta - 1) xi^2 dy, split where theta has kinks or jumps.
    auto cut = [&](double u) {
      const double y = std::exp(u);
      const double v = f.position(y);
      return y * y * (params.theta(y) - 1.0) * v * v;
    };
    std::vector<double> edges{w.lo};
    for (double s : params.theta.breakpoints()) {
      const double u = std::log(s);
      if (u > w.lo && u < w.hi)
        edges.push_back(u);
    }
    edges.push_back(w.hi);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
      // Inside the indicator's plateau the integrand is identically zero.
      if (params.theta.kind() == charges::ThetaKind::indicator &&
          edges[i + 1] <= std::log(params.theta.b()))
        continue;
      const auto r = quad::integrate_interval(cut, edges[i], edges[i + 1], spec);
      out.value += params.gamma * r.value;
      out.err_estimate += params.gamma * r.err_estimate;
      out.evaluations += r.evaluations;
    }
  }
  return scaled(out, 48.0 * pi * pi);
}

FormBreakdown phi_total(const charges::RadialCharge &f, const FormParams &params,
                        const quad::QuadratureSpec &spec) {
  params.validate();
  const auto d = phi_diag(f, params.lambda, spec);
  const auto o = phi_off(f, params.lambda, spec);
  const auto r = phi_reg(f, params.gamma, spec);
  const auto z = phi_zero(f, params, spec);
  FormBreakdown b;
  b.diag = d.value;
  b.off = o.value;
  b.reg = r.value;
  b.zero = z.value;
  b.total = b.diag + b.off + b.reg + b.zero;
  b.err_estimate = d.err_estimate + o.err_estimate + r.err_estimate + z.err_estimate;
  return b;
}

namespace {

// Trapezoid with every sample and with every second one; the difference is
// the error estimate.
template <class W>
std::pair<double, double> trapezoid_pair(const charges::MellinProfile &m, W w) {
  const std::size_t n = m.x.size();
  double fine = 0.0, coarse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = std::norm(m.value[i]) * w(m.x[i]);
    const double end = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
    fine += end * v;
    if (i % 2 == 0)
      coarse += ((i == 0 || i + 2 >= n) ? 0.5 : 1.0) * v;
  }
  return {fine * m.grid_step, coarse * 2.0 * m.grid_step};
}

} // namespace

DiagonalizedBreakdown phi_diagonalized(const charges::MellinProfile &profile,
                                       double gamma) {
  require_nonneg(gamma, "gamma");
  if (profile.x.size() < 3)
    throw DomainError("Mellin profile needs at least three samples");
  const double c = 48.0 * pi * pi;
  const auto d = trapezoid_pair(profile, [](double) { return std::numbers::sqrt3 / 2.0; });
  const auto o = trapezoid_pair(profile, [](double x) { return specfun::weight_off(x); });
  const auto r = trapezoid_pair(profile, [gamma](double x) { return specfun::weight_reg(x, gamma); });
  DiagonalizedBreakdown out;
  out.diag = c * d.first;
  out.off = c * o.first;
  out.reg = c * r.first;
  out.err_estimate = c * (std::abs(d.first - d.second) + std::abs(o.first - o.second) +
                          std::abs(r.first - r.second));
  return out;
}

DiagonalizedBreakdown phi_diagonalized(const charges::RadialCharge &f,
                                       double gamma,
                                       const quad::QuadratureSpec &spec) {
  return phi_diagonalized(charges::mellin_transform(f, spec), gamma);
}

double symbol_integral(const charges::MellinProfile &profile, double gamma) {
  const specfun::SymbolParams sp{gamma};
  return 48.0 * pi * pi *
         profile.weighted_norm_sq([&](double x) { return specfun::symbol_S(x, sp); });
}

} // namespace zr3b::forms
