#include "zr3b/quadrature.hpp"

#include "zr3b/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <vector>

namespace zr3b::quad {

namespace {

constexpr double eps = std::numeric_limits<double>::epsilon();

// Lower end of the default log windows, relative to ln R.
constexpr double semiaxis_log_span = 230.0;
constexpr double radial_log_span = 40.0;
// Cosine map u = tanh(v): sech^2(24) ~ 1e-20.
constexpr double cosine_v_max = 24.0;
// Longest initial panel for the adaptive driver.
constexpr double max_initial_panel = 8.0;

// Kronrod 21 / Gauss 10 nodes and weights on [-1, 1], non-negative half.
struct Gk21Rule {
  std::array<double, 11> node{};
  std::array<double, 11> kronrod{};
  std::array<double, 11> gauss{}; // zero where the node is Kronrod-only

  Gk21Rule() {
    namespace bq = boost::math::quadrature;
    const auto &kx = bq::gauss_kronrod<double, 21>::abscissa();
    const auto &kw = bq::gauss_kronrod<double, 21>::weights();
    const auto &gx = bq::gauss<double, 10>::abscissa();
    const auto &gw = bq::gauss<double, 10>::weights();
    for (std::size_t i = 0; i < 11; ++i) {
      node[i] = kx[i];
      kronrod[i] = kw[i];
      for (std::size_t j = 0; j < gx.size(); ++j)
        if (std::abs(gx[j] - kx[i]) < 1e-14)
          gauss[i] = gw[j];
    }
  }
};

const Gk21Rule &gk21() {
  static const Gk21Rule rule;
  return rule;
}

struct Panel {
  double a;
  double b;
  double value;
  double err;       // quadrature error estimate, drives refinement
  double inner_err; // propagated error of nested integrals, reported only
  bool frozen;
};

// Integrand sample carrying its own absolute error (nested integrals).
struct Sample {
  double value;
  double err;
};

struct PanelOrder {
  bool operator()(const Panel &x, const Panel &y) const {
    if (x.err != y.err)
      return x.err < y.err;
    return x.a > y.a; // deterministic tie-break
  }
};

template <class F> Panel gk21_panel(const F &f, double a, double b) {
  const auto &rule = gk21();
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::array<double, 21> fv{};
  std::array<double, 21> ev{};
  auto sample = [&](int slot, double x) {
    const Sample s = f(x);
    fv[slot] = s.value;
    ev[slot] = s.err;
  };
  sample(0, center);
  for (int i = 1; i < 11; ++i) {
    sample(2 * i - 1, center - half * rule.node[i]);
    sample(2 * i, center + half * rule.node[i]);
  }
  double inner_err = rule.kronrod[0] * ev[0];
  for (int i = 1; i < 11; ++i)
    inner_err += rule.kronrod[i] * (ev[2 * i - 1] + ev[2 * i]);
  inner_err *= std::abs(half);
  double resk = rule.kronrod[0] * fv[0];
  double resg = rule.gauss[0] * fv[0];
  double resabs = rule.kronrod[0] * std::abs(fv[0]);
  for (int i = 1; i < 11; ++i) {
    const double pair = fv[2 * i - 1] + fv[2 * i];
    resk += rule.kronrod[i] * pair;
    resg += rule.gauss[i] * pair;
    resabs += rule.kronrod[i] *
              (std::abs(fv[2 * i - 1]) + std::abs(fv[2 * i]));
  }
  const double mean = 0.5 * resk;
  double resasc = rule.kronrod[0] * std::abs(fv[0] - mean);
  for (int i = 1; i < 11; ++i)
    resasc += rule.kronrod[i] *
              (std::abs(fv[2 * i - 1] - mean) + std::abs(fv[2 * i] - mean));

  const double scale = std::abs(half);
  const double value = resk * half;
  resabs *= scale;
  resasc *= scale;
  // QUADPACK qk21 error heuristic
  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps))
    err = std::max(50.0 * eps * resabs, err);
  const bool at_roundoff = err <= 50.0 * eps * resabs;
  return Panel{a, b, value, err, inner_err, at_roundoff};
}

Sample as_sample(double v) { return {v, 0.0}; }
Sample as_sample(const Sample &s) { return s; }

bool tolerance_met(double err, double value, const QuadratureSpec &spec) {
  return err <= std::max(spec.abs_tol, spec.rel_tol * std::abs(value));
}

template <class F>
QuadResult adaptive_gk(const F &f, double lo, double hi,
                       const QuadratureSpec &spec) {
  QuadResult out;
  if (lo == hi)
    return out;
  double sign = 1.0;
  if (hi < lo) {
    std::swap(lo, hi);
    sign = -1.0;
  }
  std::size_t evaluations = 0;
  auto counted = [&](double x) {
    ++evaluations;
    return as_sample(f(x));
  };

  const int n0 = std::max(
      1, static_cast<int>(std::ceil((hi - lo) / max_initial_panel)));
  std::priority_queue<Panel, std::vector<Panel>, PanelOrder> open;
  std::vector<Panel> done;
  double total = 0.0;
  double total_err = 0.0;
  for (int i = 0; i < n0; ++i) {
    const double a = lo + (hi - lo) * i / n0;
    const double b = i + 1 == n0 ? hi : lo + (hi - lo) * (i + 1) / n0;
    Panel p = gk21_panel(counted, a, b);
    total += p.value;
    total_err += p.err;
    if (p.frozen)
      done.push_back(p);
    else
      open.push(p);
  }

  int panels = n0;
  while (!tolerance_met(total_err, total, spec) && !open.empty()) {
    if (panels >= spec.max_subdivisions) {
      throw ConvergenceError("adaptive quadrature: subdivision budget exhausted",
                             sign * total, total_err);
    }
    Panel worst = open.top();
    open.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b) ||
        (worst.b - worst.a) < 100.0 * eps * std::max(std::abs(worst.a), std::abs(worst.b))) {
      worst.frozen = true;
      done.push_back(worst);
      continue;
    }
    Panel left = gk21_panel(counted, worst.a, mid);
    Panel right = gk21_panel(counted, mid, worst.b);
    ++panels;
    total += left.value + right.value - worst.value;
    total_err += left.err + right.err - worst.err;
    for (Panel *p : {&left, &right}) {
      if (p->frozen)
        done.push_back(*p);
      else
        open.push(*p);
    }
  }

  while (!open.empty()) {
    done.push_back(open.top());
    open.pop();
  }
  // Re-sum in a fixed order so that incremental drift does not leak out.
  std::sort(done.begin(), done.end(),
            [](const Panel &x, const Panel &y) { return x.a < y.a; });
  double value = 0.0;
  double err = 0.0;
  double inner_err = 0.0;
  for (const auto &p : done) {
    value += p.value;
    err += p.err;
    inner_err += p.inner_err;
  }
  out.value = sign * value;
  out.err_estimate = err + inner_err;
  out.evaluations = evaluations;
  // Roundoff-limited panels are accepted as they are; what must still fit
  // the tolerance is the error handed up from nested integrals.
  if (!tolerance_met(inner_err, value, spec) || !std::isfinite(value))
    throw ConvergenceError("adaptive quadrature: nested integrals too inaccurate",
                           out.value, out.err_estimate);
  return out;
}

QuadResult double_exponential(const Fn1 &f, double lo, double hi,
                              const QuadratureSpec &spec) {
  thread_local boost::math::quadrature::tanh_sinh<double> integrator(15);
  QuadResult out;
  std::size_t evaluations = 0;
  auto counted = [&](double x) {
    ++evaluations;
    return f(x);
  };
  double error = 0.0;
  double l1 = 0.0;
  std::size_t levels = 0;
  const double value =
      integrator.integrate(counted, lo, hi, spec.rel_tol, &error, &l1, &levels);
  const double abs_err = error * l1;
  out.value = value;
  out.err_estimate = abs_err;
  out.evaluations = evaluations;
  if (!std::isfinite(value) || !tolerance_met(abs_err, value, spec))
    throw ConvergenceError("double-exponential quadrature did not converge",
                           value, abs_err);
  return out;
}

// Nested integrals: inner results carry their own error, which the outer
// rule propagates with its Kronrod weights instead of refining on it.
QuadResult integrate_nested(const std::function<Sample(double)> &f, double lo,
                            double hi, const QuadratureSpec &spec) {
  if (spec.scheme == Scheme::double_exponential) {
    double worst = 0.0;
    QuadResult r = double_exponential(
        [&](double x) {
          const Sample s = f(x);
          worst = std::max(worst, s.err);
          return s.value;
        },
        lo, hi, spec);
    r.err_estimate += worst * std::abs(hi - lo);
    return r;
  }
  return adaptive_gk(f, lo, hi, spec);
}

// Inner integral that never throws: a budget overrun hands its best estimate
// and error to the outer level.
Sample inner_sample(const Fn1 &f, double lo, double hi,
                    const QuadratureSpec &spec, std::size_t &evaluations) {
  try {
    const QuadResult r = integrate_interval(f, lo, hi, spec);
    evaluations += r.evaluations;
    return {r.value, r.err_estimate};
  } catch (const ConvergenceError &e) {
    return {e.best_estimate(), e.error_estimate()};
  }
}

Sample nested_sample(const std::function<Sample(double)> &f, double lo,
                     double hi, const QuadratureSpec &spec) {
  try {
    const QuadResult r = integrate_nested(f, lo, hi, spec);
    return {r.value, r.err_estimate};
  } catch (const ConvergenceError &e) {
    return {e.best_estimate(), e.error_estimate()};
  }
}

QuadratureSpec inner_spec(const QuadratureSpec &spec, double outer_width) {
  QuadratureSpec s = spec;
  s.rel_tol = spec.rel_tol * 0.1;
  s.abs_tol = spec.abs_tol * 0.1 / std::max(1.0, outer_width);
  return s;
}


Fn1 cosine_mapped(const Fn1 &F) {
  return [&F](double v) {
    const double c = std::cosh(v);
    return F(std::tanh(v)) / (c * c);
  };
}

} // namespace

void QuadratureSpec::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
    throw DomainError("QuadratureSpec: tolerances must be positive");
  if (max_subdivisions < 1)
    throw DomainError("QuadratureSpec: max_subdivisions must be >= 1");
  if (!(truncation_radius > 0.0) || !std::isfinite(truncation_radius))
    throw DomainError("QuadratureSpec: truncation_radius must be positive");
}

QuadratureSpec QuadratureSpec::tightened(double factor) const {
  QuadratureSpec s = *this;
  s.abs_tol *= factor;
  s.rel_tol *= factor;
  return s;
}

QuadResult integrate_interval(const Fn1 &f, double lo, double hi,
                              const QuadratureSpec &spec) {
  spec.validate();
  if (!std::isfinite(lo) || !std::isfinite(hi))
    throw DomainError("integrate_interval: bounds must be finite");
  if (spec.scheme == Scheme::double_exponential && lo != hi) {
    if (hi < lo) {
      QuadResult r = double_exponential(f, hi, lo, spec);
      r.value = -r.value;
      return r;
    }
    return double_exponential(f, lo, hi, spec);
  }
  return adaptive_gk(f, lo, hi, spec);
}

QuadResult integrate_semiaxis(const Fn1 &f, const Window &log_window,
                              const QuadratureSpec &spec) {
  auto mapped = [&](double t) {
    const double x = std::exp(t);
    return f(x) * x;
  };
  return integrate_interval(mapped, log_window.lo, log_window.hi, spec);
}

QuadResult integrate_semiaxis(const Fn1 &f, const QuadratureSpec &spec) {
  spec.validate();
  const double top = std::log(spec.truncation_radius);
  return integrate_semiaxis(f, Window{top - semiaxis_log_span, top}, spec);
}

QuadResult integrate_square_logdiag(const Fn2 &K, double lo, double hi,
                                    const QuadratureSpec &spec) {
  spec.validate();
  if (!(hi > lo))
    throw DomainError("integrate_square_logdiag: empty square");
  const double half_width = 0.5 * (hi - lo);
  const QuadratureSpec ispec = inner_spec(spec, half_width);
  std::size_t evaluations = 0;
  // p = sigma + delta, q = sigma - delta; dp dq = 2 dsigma ddelta.
  auto over_sigma = [&](double delta) {
    auto both_halves = [&](double sigma) {
      return K(sigma + delta, sigma - delta) + K(sigma - delta, sigma + delta);
    };
    const Sample r = inner_sample(both_halves, lo + delta, hi - delta, ispec,
                                  evaluations);
    return Sample{2.0 * r.value, 2.0 * r.err};
  };
  QuadResult out = integrate_nested(over_sigma, 0.0, half_width, spec);
  out.evaluations = evaluations;
  return out;
}

QuadResult integrate_square_logdiag(const Fn2 &K, const Window &log_window,
                                    const QuadratureSpec &spec) {
  auto mapped = [&](double t, double s) {
    const double p = std::exp(t);
    const double q = std::exp(s);
    return K(p, q) * p * q;
  };
  return integrate_square_logdiag(mapped, log_window.lo, log_window.hi, spec);
}

QuadResult integrate_square_logdiag(const Fn2 &K, const QuadratureSpec &spec) {
  spec.validate();
  const double top = std::log(spec.truncation_radius);
  return integrate_square_logdiag(K, Window{top - semiaxis_log_span, top}, spec);
}

QuadResult integrate_cosine(const Fn1 &F, const QuadratureSpec &spec) {
  return integrate_interval(cosine_mapped(F), -cosine_v_max,
                            cosine_v_max, spec);
}

QuadResult integrate_radial_pair(const Fn3 &F, const Window &log_window,
                                 const QuadratureSpec &spec) {
  spec.validate();
  if (!(log_window.hi > log_window.lo))
    throw DomainError("integrate_radial_pair: empty window");
  const double lo = log_window.lo;
  const double hi = log_window.hi;
  const double half_width = 0.5 * (hi - lo);
  const QuadratureSpec sspec = inner_spec(spec, half_width);
  const QuadratureSpec cspec = inner_spec(sspec, hi - lo);
  std::size_t evaluations = 0;

  // Angular integral at radii x = e^t, y = e^s, including x^3 y^3 from the
  // radial measure and the log map.
  auto radial = [&](double t, double s) {
    const double x = std::exp(t);
    const double y = std::exp(s);
    const Fn1 at_cosine = [&](double u) { return F(x, y, u); };
    const double w = x * x * x * y * y * y;
    if (!(w > 0.0) || !std::isfinite(w))
      return Sample{0.0, 0.0};
    // The absolute target refers to the weighted contribution.
    QuadratureSpec local = cspec;
    local.abs_tol = cspec.abs_tol / w;
    const Sample a = inner_sample(cosine_mapped(at_cosine), -cosine_v_max,
                                  cosine_v_max, local, evaluations);
    return Sample{w * a.value, w * a.err};
  };
  auto over_sigma = [&](double delta) {
    auto both_halves = [&](double sigma) {
      const Sample a = radial(sigma + delta, sigma - delta);
      const Sample b = radial(sigma - delta, sigma + delta);
      return Sample{a.value + b.value, a.err + b.err};
    };
    const Sample r = nested_sample(both_halves, lo + delta, hi - delta, sspec);
    return Sample{2.0 * r.value, 2.0 * r.err};
  };
  QuadResult out = integrate_nested(over_sigma, 0.0, half_width, spec);
  const double prefactor = 8.0 * std::numbers::pi * std::numbers::pi;
  out.value *= prefactor;
  out.err_estimate *= prefactor;
  out.evaluations = evaluations;
  return out;
}

QuadResult integrate_radial_pair(const Fn3 &F, const QuadratureSpec &spec) {
  spec.validate();
  const double top = std::log(spec.truncation_radius);
  return integrate_radial_pair(F, Window{top - radial_log_span, top}, spec);
}

} // namespace zr3b::quad
