#pragma once

#include <cstddef>
#include <functional>

namespace zr3b::quad {

enum class Scheme { gauss_legendre_adaptive, double_exponential };

struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_subdivisions = 2000;
  double truncation_radius = 60.0; // upper cut for (0, inf) domains
  Scheme scheme = Scheme::gauss_legendre_adaptive;

  void validate() const; // throws DomainError

  /// Same scheme and budget, tolerances scaled by `factor`.
  QuadratureSpec tightened(double factor) const;
};

struct QuadResult {
  double value = 0.0;
  double err_estimate = 0.0;
  std::size_t evaluations = 0;
};

/// Closed interval [lo, hi] in some coordinate, used for log-variable windows.
struct Window {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

using Fn1 = std::function<double(double)>;
using Fn2 = std::function<double(double, double)>;
using Fn3 = std::function<double(double, double, double)>;

/// Adaptive integral over a finite interval. Endpoints are never evaluated.
QuadResult integrate_interval(const Fn1 &f, double lo, double hi,
                              const QuadratureSpec &spec);

/// int_0^R f(x) dx with R = spec.truncation_radius, computed in the variable
/// t = ln x over [ln R - 230, ln R]. Integrable endpoint singularities at 0 and
/// functions spread over many decades are both handled by the log map.
QuadResult integrate_semiaxis(const Fn1 &f, const QuadratureSpec &spec);

/// Same, over an explicit window of t = ln x.
QuadResult integrate_semiaxis(const Fn1 &f, const Window &log_window,
                              const QuadratureSpec &spec);

/// Double integral of K over the square [lo, hi]^2 where K may carry a
/// logarithmic singularity on the diagonal. The square is rotated to
/// (sigma, delta) = ((p+q)/2, (p-q)/2) and split at delta = 0; the delta
/// integral is outer, so the singularity sits at an endpoint of a 1D
/// adaptive integral.
QuadResult integrate_square_logdiag(const Fn2 &K, double lo, double hi,
                                    const QuadratureSpec &spec);

/// int_0^R int_0^R K(p, q) dp dq via p = e^t, q = e^s on the log window
/// [ln R - 230, ln R] (or the supplied one). The diagonal stays a diagonal.
QuadResult integrate_square_logdiag(const Fn2 &K, const QuadratureSpec &spec);
QuadResult integrate_square_logdiag(const Fn2 &K, const Window &log_window,
                                    const QuadratureSpec &spec);

/// int d^3x d^3y G for G depending on |x|, |y| and the cosine u between them:
///   8 pi^2 int x^2 dx int y^2 dy int_{-1}^{1} du F(x, y, u).
/// Radii run over the log window, the cosine is mapped by u = tanh(v) so that
/// kernels concentrated at u = +-1 become smooth bumps.
QuadResult integrate_radial_pair(const Fn3 &F, const QuadratureSpec &spec);
QuadResult integrate_radial_pair(const Fn3 &F, const Window &log_window,
                                 const QuadratureSpec &spec);

/// int_{-1}^{1} F(u) du through u = tanh(v).
QuadResult integrate_cosine(const Fn1 &F, const QuadratureSpec &spec);

} // namespace zr3b::quad
