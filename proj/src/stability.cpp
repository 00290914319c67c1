#include "zr3b/stability.hpp"

#include "zr3b/charges.hpp"
#include "zr3b/errors.hpp"
#include "zr3b/specfun.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <thread>

namespace zr3b::stability {

using std::numbers::pi;

double gamma_critical() { return 4.0 / 3.0 - std::numbers::sqrt3 / pi; }

double gamma_prime_critical() { return 2.0 - std::numbers::sqrt3 / pi; }

SymbolMinimum min_symbol(double gamma, double x_max, int grid) {
  if (!(x_max > 0.0) || !std::isfinite(x_max))
    throw DomainError("min_symbol: x_max must be positive");
  if (grid < 3)
    throw DomainError("min_symbol: grid needs at least 3 points");
  const specfun::SymbolParams sp{gamma};
  auto S = [&](double x) { return specfun::symbol_S(x, sp); };

  const double h = x_max / (grid - 1);
  int best = 0;
  double best_val = S(0.0);
  for (int k = 1; k < grid; ++k) {
    const double v = S(k * h);
    if (v < best_val) {
      best_val = v;
      best = k;
    }
  }

  // golden section on the neighbouring cells
  double a = std::max(0.0, (best - 1) * h);
  double b = std::min(x_max, (best + 1) * h);
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = S(c), fd = S(d);
  while (b - a > 1e-12 * std::max(1.0, std::abs(b))) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = S(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = S(d);
    }
  }
  SymbolMinimum out{best * h, best_val};
  for (double x : {a, b, 0.5 * (a + b)}) {
    const double v = S(x);
    if (v < out.s_min)
      out = {x, v};
  }
  return out;
}

double threshold_from_symbol(double tol, double x_max) {
  if (!(tol > 0.0))
    throw DomainError("threshold_from_symbol: tol must be positive");
  double lo = threshold_bracket_lo, hi = threshold_bracket_hi;
  if (!(min_symbol(lo, x_max).s_min < 0.0) || !(min_symbol(hi, x_max).s_min >= 0.0))
    throw BracketError("threshold_from_symbol: s_min does not change sign on [0.5, 1.5]");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (min_symbol(mid, x_max).s_min < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double trial_symbol_integral(double beta, double gamma,
                             const quad::QuadratureSpec &spec) {
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw DomainError("trial_symbol_integral: beta must be positive");
  const specfun::SymbolParams sp{gamma};
  auto integrand = [&](double nu) {
    const double k = specfun::macdonald_imag_order(nu);
    return k * k * specfun::symbol_S(beta * nu, sp);
  };
  // K_{i nu}(1)^2 ~ e^{-pi nu}; nu = 16 is far below double precision
  const auto r = quad::integrate_interval(integrand, 0.0, 16.0, spec);
  // 48 pi^2 (2 / (pi beta^2)) * beta * 2 int_0^inf
  return 192.0 * pi / beta * r.value;
}

double trial_symbol_integral_sampled(double beta, double gamma,
                                     const quad::QuadratureSpec &spec) {
  const auto f = charges::trial_fbeta(beta);
  const double step = 0.05 * std::min(1.0, beta);
  const auto profile =
      charges::mellin_transform(f, f.envelope().mellin_extent, step, spec);
  return forms::symbol_integral(profile, gamma);
}

int sweep_threads() {
  const char *env = std::getenv("ZR3B_THREADS");
  if (!env)
    return 1;
  char *end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0')
    return 1;
  return static_cast<int>(std::clamp(v, 1L, 64L));
}

std::vector<SweepRecord> collapse_sweep(double beta,
                                        const forms::FormParams &params,
                                        const std::vector<int> &n_list,
                                        const quad::QuadratureSpec &spec) {
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw DomainError("collapse_sweep: beta must be positive");
  if (n_list.empty())
    throw DomainError("collapse_sweep: empty n list");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 1 || (i > 0 && n_list[i] <= n_list[i - 1]))
      throw DomainError("collapse_sweep: n list must be positive and increasing");
  }
  params.validate();
  spec.validate();

  const auto base = charges::trial_fbeta(beta);
  std::vector<SweepRecord> out(n_list.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < n_list.size(); i = next++) {
      SweepRecord &rec = out[i];
      rec.n = n_list[i];
      rec.beta = beta;
      rec.gamma = params.gamma;
      rec.lambda = params.lambda;
      try {
        const auto eta = charges::scale_charge(base, rec.n);
        rec.breakdown = forms::phi_total(eta, params, spec);
        rec.total_over_n2 =
            rec.breakdown.total / (static_cast<double>(rec.n) * rec.n);
      } catch (const std::exception &e) {
        rec.ok = false;
        rec.error = e.what();
      }
    }
  };

  const int threads =
      std::min<int>(sweep_threads(), static_cast<int>(n_list.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int k = 0; k < threads; ++k)
      pool.emplace_back(worker);
  }
  return out;
}

ScalingFit fit_scaling(const std::vector<SweepRecord> &records) {
  std::vector<const SweepRecord *> good;
  for (const auto &r : records)
    if (r.ok)
      good.push_back(&r);
  if (good.size() < 4)
    throw DomainError("fit_scaling: need at least 4 successful records");

  // columns scaled by the largest n to keep the normal equations tame
  double nmax = 0.0;
  for (auto *r : good)
    nmax = std::max(nmax, static_cast<double>(r->n));
  double saa = 0, sab = 0, sbb = 0, say = 0, sby = 0;
  for (auto *r : good) {
    const double b = r->n / nmax, a = b * b, y = r->breakdown.total;
    saa += a * a;
    sab += a * b;
    sbb += b * b;
    say += a * y;
    sby += b * y;
  }
  const double det = saa * sbb - sab * sab;
  if (!(det > 0.0))
    throw DomainError("fit_scaling: degenerate n values");
  const double ca = (say * sbb - sby * sab) / det;
  const double cb = (saa * sby - sab * say) / det;

  ScalingFit fit;
  fit.c2 = ca / (nmax * nmax);
  fit.c1 = cb / nmax;
  double ss = 0.0;
  for (auto *r : good) {
    const double n = r->n;
    const double d = r->breakdown.total - (fit.c2 * n * n + fit.c1 * n);
    ss += d * d;
  }
  fit.residual = std::sqrt(ss);
  fit.used = static_cast<int>(good.size());
  return fit;
}

CollapseVerdict collapse_verdict(const std::vector<SweepRecord> &records) {
  std::vector<double> totals;
  for (const auto &r : records)
    if (r.ok)
      totals.push_back(r.breakdown.total);
  CollapseVerdict v;
  if (totals.size() < 5)
    return v;
  v.decreasing = true;
  for (std::size_t i = totals.size() - 4; i < totals.size(); ++i)
    if (!(totals[i] < totals[i - 1]))
      v.decreasing = false;
  v.deep = totals.back() < -100.0 * std::abs(totals.front());
  return v;
}

std::optional<double> find_negative_beta(double gamma,
                                         const std::vector<double> &beta_grid,
                                         const quad::QuadratureSpec &spec) {
  if (!(gamma < gamma_critical()))
    throw DomainError("find_negative_beta: gamma must be below gamma_c");
  std::optional<double> best;
  for (double beta : beta_grid) {
    if (!(beta > 0.0))
      throw DomainError("find_negative_beta: grid values must be positive");
    if (best && beta <= *best)
      continue;
    if (trial_symbol_integral(beta, gamma, spec) < 0.0)
      best = beta;
  }
  return best;
}

} // namespace zr3b::stability
