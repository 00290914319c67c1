#include "zr3b/cli.hpp"

#include "zr3b/errors.hpp"
#include "zr3b/position_forms.hpp"
#include "zr3b/specfun.hpp"
#include "zr3b/stability.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>

namespace zr3b::cli {

namespace {

using std::numbers::pi;
using std::numbers::sqrt3;

struct Outcome {
  bool passed = true;
  std::ostringstream detail;

  // records a failed comparison, keeps the first few in the detail text
  void expect(bool ok, const std::string &what) {
    if (!ok) {
      if (passed)
        detail << what;
      else if (detail.str().size() < 400)
        detail << "; " << what;
      passed = false;
    }
  }
};

std::string describe(const std::string &label, double got, double want) {
  std::ostringstream os;
  os.precision(12);
  os << label << ": got " << got << " want " << want;
  return os.str();
}

double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

quad::QuadratureSpec default_spec() { return {}; }

// Pair integrals in position space are costly; the observed error at these
// tolerances is far below the 1e-5 comparison.
quad::QuadratureSpec position_spec() {
  quad::QuadratureSpec s;
  s.rel_tol = 1e-7;
  return s;
}

using Check = std::function<void(Outcome &, double gamma_c)>;

struct NamedCheck {
  std::string name;
  VerifyLevel level;
  Check run;
};

// ---- fast ----

void check_thresholds(Outcome &o, double gc) {
  const double gpc = stability::gamma_prime_critical();
  o.expect(std::abs(gc - 0.782004) <= 5e-7, describe("gamma_c", gc, 0.782004));
  o.expect(std::abs(gpc - 1.44867) <= 5e-6, describe("gamma'_c", gpc, 1.44867));
  o.expect(std::abs(gpc - gc - 2.0 / 3.0) <= 1e-15,
           describe("gamma'_c - gamma_c", gpc - gc, 2.0 / 3.0));
  const double s0 = specfun::symbol_S(0.0, {gc});
  o.expect(std::abs(s0) <= 1e-14, describe("S(0, gamma_c)", s0, 0.0));
}

void check_bisection(Outcome &o, double gc) {
  const double g = stability::threshold_from_symbol(1e-10);
  o.expect(std::abs(g - gc) <= 1e-8, describe("bisection", g, gc));
  const double g20 = stability::threshold_from_symbol(1e-10, 20.0);
  o.expect(std::abs(g20 - g) <= 1e-9, describe("bisection x_max=20", g20, g));
}

void check_symbol_at_zero(Outcome &o, double gc) {
  for (double g : {0.0, 0.5, gc, 1.0, 2.0}) {
    const double s0 = specfun::symbol_S(0.0, {g});
    const double want = 0.5 * pi * (g - gc);
    o.expect(std::abs(s0 - want) <= 1e-12, describe("S(0) at gamma " + std::to_string(g), s0, want));
    // the x -> 0 limit of the general formula
    const double near = specfun::symbol_S(1e-9, {g});
    o.expect(std::abs(near - want) <= 1e-12, describe("S(1e-9)", near, want));
  }
}

void check_symbol_sign(Outcome &o, double gc) {
  for (double g : {0.8, 1.0, 1.5, 3.0}) {
    const auto m = stability::min_symbol(g);
    o.expect(m.s_min >= 0.0, describe("s_min at gamma " + std::to_string(g), m.s_min, 0.0));
  }
  for (double g : {0.0, 0.3, 0.6, 0.75}) {
    const auto m = stability::min_symbol(g);
    o.expect(m.s_min < 0.0, describe("s_min at gamma " + std::to_string(g), m.s_min, -1.0));
  }
  const auto m = stability::min_symbol(gc);
  o.expect(std::abs(m.s_min) <= 1e-10, describe("s_min at gamma_c", m.s_min, 0.0));
}

void check_bessel_k2(Outcome &o, double) {
  for (int k = 0; k <= 60; ++k) {
    const double x = 1e-6 * std::pow(7e8, k / 60.0);
    const double got = specfun::bessel_k2(x);
    const double want = boost::math::cyl_bessel_k(2, x);
    o.expect(rel_diff(got, want) <= 1e-12, describe("K2(" + std::to_string(x) + ")", got, want));
  }
}

void check_macdonald_imag(Outcome &o, double) {
  boost::math::quadrature::tanh_sinh<double> ts;
  for (double nu : {0.0, 0.5, 1.0, 2.5, 5.0, 10.0}) {
    auto f = [nu](double t) { return std::exp(-std::cosh(t)) * std::cos(nu * t); };
    const double want = ts.integrate(f, 0.0, 8.0);
    const double got = specfun::macdonald_imag_order(nu);
    o.expect(std::abs(got - want) <= 1e-12,
             describe("K_i" + std::to_string(nu) + "(1)", got, want));
  }
}

void check_momentum_closed_forms(Outcome &o, double) {
  const auto g = charges::gaussian_charge(1.0);
  const auto spec = default_spec();
  const double d = forms::phi_diag(g, 0.0, spec).value;
  const double off = forms::phi_off(g, 0.0, spec).value;
  const double r = forms::phi_reg(g, 1.0, spec).value;
  o.expect(rel_diff(d, 12.0 * sqrt3 * pi * pi) <= 1e-6, describe("diag", d, 12.0 * sqrt3 * pi * pi));
  o.expect(rel_diff(off, -96.0 * pi * pi * (2.0 - sqrt3)) <= 1e-6,
           describe("off", off, -96.0 * pi * pi * (2.0 - sqrt3)));
  o.expect(rel_diff(r, 24.0 * pi * pi) <= 1e-6, describe("reg", r, 24.0 * pi * pi));
}

void check_diagonalized(Outcome &o, double) {
  const auto spec = default_spec();
  for (const char *cs : {"gaussian:1", "fbeta:1"}) {
    const auto f = charges::parse_charge_spec(cs);
    const auto dz = forms::phi_diagonalized(f, 1.0, spec);
    const double d = forms::phi_diag(f, 0.0, spec).value;
    const double off = forms::phi_off(f, 0.0, spec).value;
    const double r = forms::phi_reg(f, 1.0, spec).value;
    const std::string tag = std::string(cs) + " ";
    o.expect(rel_diff(dz.diag, d) <= 1e-5, describe(tag + "diag", dz.diag, d));
    o.expect(rel_diff(dz.off, off) <= 1e-5, describe(tag + "off", dz.off, off));
    o.expect(rel_diff(dz.reg, r) <= 1e-5, describe(tag + "reg", dz.reg, r));
  }
}

void check_mellin(Outcome &o, double) {
  const auto f = charges::trial_fbeta(1.0);
  const auto prof = charges::mellin_transform(f, default_spec());
  double worst = 0.0, peak = 0.0;
  for (std::size_t i = 0; i < prof.x.size(); ++i) {
    const double want = charges::trial_mellin_closed_form(1.0, prof.x[i]);
    peak = std::max(peak, std::abs(want));
    worst = std::max(worst, std::abs(prof.value[i] - want));
  }
  o.expect(worst <= 1e-8 * peak, describe("max |f# - closed form|", worst, 0.0));
}

void check_trial_integral(Outcome &o, double) {
  const auto spec = default_spec();
  for (double g : {0.5, 2.0}) {
    const double a = stability::trial_symbol_integral(0.3, g, spec);
    const double b = stability::trial_symbol_integral_sampled(0.3, g, spec);
    o.expect(rel_diff(b, a) <= 1e-8, describe("beta 0.3 gamma " + std::to_string(g), b, a));
  }
}

// ---- full ----

void check_position_vs_momentum(Outcome &o, double) {
  const auto mspec = default_spec();
  const auto pspec = position_spec();
  for (const char *cs : {"gaussian:1", "fbeta:1"}) {
    const auto f = charges::parse_charge_spec(cs);
    for (double lam : {0.5, 1.0, 4.0}) {
      const std::string tag = std::string(cs) + " lambda " + std::to_string(lam) + " ";
      const double dm = forms::phi_diag(f, lam, mspec).value;
      const double dp = forms::phi_diag_position(f, lam, pspec).value;
      o.expect(rel_diff(dp, dm) <= 1e-5, describe(tag + "diag", dp, dm));
      const double om = forms::phi_off(f, lam, mspec).value;
      const double op = forms::phi_off_position(f, lam, pspec).value;
      o.expect(rel_diff(op, om) <= 1e-5, describe(tag + "off", op, om));
    }
    const double rm = forms::phi_reg(f, 1.0, mspec).value;
    const double rp = forms::phi_reg_position(f, 1.0, pspec).value;
    o.expect(rel_diff(rp, rm) <= 1e-5, describe(std::string(cs) + " reg", rp, rm));
  }
}

void check_yukawa(Outcome &o, double) {
  for (double lam : {0.25, 1.0, 4.0})
    for (double y : {0.5, 1.0, 2.0}) {
      const double r = forms::yukawa_identity_residual(lam, y, default_spec());
      o.expect(r <= 1e-6, describe("residual lambda " + std::to_string(lam) + " y " +
                                       std::to_string(y), r, 0.0));
    }
}

void check_position_closed_forms(Outcome &o, double) {
  const auto g = charges::gaussian_charge(1.0);
  const double r = forms::phi_reg_position(g, 1.0, default_spec()).value;
  o.expect(rel_diff(r, 24.0 * pi * pi) <= 1e-6, describe("reg position", r, 24.0 * pi * pi));
  const double d = forms::phi_diagonalized(g, 0.0, default_spec()).diag;
  o.expect(rel_diff(d, 12.0 * sqrt3 * pi * pi) <= 1e-6,
           describe("diag diagonalized", d, 12.0 * sqrt3 * pi * pi));
  const auto hr = forms::hardy_rellich(g, default_spec());
  o.expect(rel_diff(hr.lhs, 2.0 * pi) <= 1e-6, describe("Hardy lhs", hr.lhs, 2.0 * pi));
  o.expect(rel_diff(hr.rhs, pi * pi) <= 1e-6, describe("Hardy rhs", hr.rhs, pi * pi));
}

void check_hardy_battery(Outcome &o, double) {
  const auto battery = mixture_battery(20, battery_seed);
  for (std::size_t i = 0; i < battery.size(); ++i) {
    const auto hr = forms::hardy_rellich(battery[i], default_spec());
    o.expect(hr.gap() >= 0.0, describe("gap, charge " + std::to_string(i), hr.gap(), 0.0));
  }
}

void check_sandwich_battery(Outcome &o, double) {
  const auto battery = mixture_battery(20, battery_seed);
  for (std::size_t i = 0; i < battery.size(); ++i)
    for (double g : {0.5, 1.0, 2.0, 3.0})
      for (double lam : {1.0, 10.0}) {
        const auto sb = forms::sandwich_bounds(battery[i], battery_params(g, lam), default_spec());
        std::ostringstream os;
        os << "charge " << i << " gamma " << g << " lambda " << lam << ": " << sb.lower
           << " <= " << sb.value << " <= " << sb.upper;
        o.expect(sb.holds(), os.str());
      }
}

void check_coercive_battery(Outcome &o, double) {
  const auto battery = mixture_battery(20, battery_seed);
  int exercised = 0;
  for (double g : {0.5, 1.0, 2.0, 3.0}) {
    if (!(g > stability::gamma_prime_critical()))
      continue;
    for (double lam : {1.0, 10.0}) {
      const auto params = battery_params(g, lam);
      if (!forms::coercive_lambda_threshold(params).exceeded_by(lam))
        continue;
      for (std::size_t i = 0; i < battery.size(); ++i) {
        ++exercised;
        const double total = forms::phi_total(battery[i], params, default_spec()).total;
        std::ostringstream os;
        os << "charge " << i << " gamma " << g << " lambda " << lam << " total " << total;
        o.expect(total > 0.0, os.str());
      }
    }
  }
  o.expect(exercised > 0, "no battery entry above the lambda threshold");
}

forms::FormParams collapse_params(double gamma, double lambda) {
  forms::FormParams p;
  p.gamma = gamma;
  p.lambda = lambda;
  return p;
}

void check_collapse_sign(Outcome &o, double) {
  std::vector<int> ns;
  for (int n = 1; n <= 32; ++n)
    ns.push_back(n);
  const auto below = stability::collapse_sweep(0.3, collapse_params(0.5, 1.0), ns, default_spec());
  const auto fit_below = stability::fit_scaling(below);
  o.expect(fit_below.c2 < 0.0, describe("c2 at gamma 0.5", fit_below.c2, -1.0));
  o.expect(stability::collapse_verdict(below).decreasing, "gamma 0.5: last 5 totals not decreasing");
  const auto above = stability::collapse_sweep(0.3, collapse_params(2.0, 1.0), ns, default_spec());
  const auto fit_above = stability::fit_scaling(above);
  o.expect(fit_above.c2 > 0.0, describe("c2 at gamma 2", fit_above.c2, 1.0));
}

// n up to 2^20 on a half-octave grid; the fit uses n >= 1024, where the
// finite-lambda part of total/n^2 has decayed below the 1% level.
double extended_c2(double lambda) {
  const auto all = stability::collapse_sweep(0.3, collapse_params(0.5, lambda),
                                             geometric_n_list(1 << 20), default_spec());
  std::vector<stability::SweepRecord> tail;
  std::copy_if(all.begin(), all.end(), std::back_inserter(tail),
               [](const auto &r) { return r.n >= 1024; });
  return stability::fit_scaling(tail).c2;
}

void check_collapse_c2(Outcome &o, double) {
  const double want = stability::trial_symbol_integral(0.3, 0.5, default_spec());
  const double c2 = extended_c2(1.0);
  o.expect(rel_diff(c2, want) <= 0.01, describe("c2 vs diagonalized", c2, want));
}

void check_lambda_independence(Outcome &o, double) {
  std::vector<double> c2;
  for (double lam : {1.0, 5.0, 25.0})
    c2.push_back(extended_c2(lam));
  for (std::size_t i = 0; i < c2.size(); ++i)
    for (std::size_t j = i + 1; j < c2.size(); ++j)
      o.expect(rel_diff(c2[i], c2[j]) <= 0.02, describe("c2 pair", c2[i], c2[j]));
}

void check_zero_linear(Outcome &o, double) {
  const auto params = collapse_params(0.5, 1.0);
  const auto base = charges::trial_fbeta(0.3);
  const double norm = charges::l2_norm_sq(base, default_spec());
  const double sup_beta =
      std::abs(params.inv_scattering_length) + params.gamma / params.theta.b();
  const double bound = 12.0 * pi * sup_beta * norm;
  for (int n : geometric_n_list(1024)) {
    const auto eta = charges::scale_charge(base, n);
    const double z = forms::phi_zero(eta, params, default_spec()).value;
    o.expect(std::abs(z) / n <= bound, describe("|zero|/n at n " + std::to_string(n), std::abs(z) / n, bound));
  }
}

void check_negative_beta(Outcome &o, double gc) {
  const auto spec = default_spec();
  const auto b07 = stability::find_negative_beta(0.7, {1, 0.5, 0.25, 0.1, 0.05}, spec);
  o.expect(b07.has_value(), "gamma 0.7: no negative beta on grid");
  if (b07)
    o.expect(stability::trial_symbol_integral(*b07, 0.7, spec) < 0.0, "gamma 0.7: returned beta not negative");
  const auto b0 = stability::find_negative_beta(0.0, {1, 0.5, 0.25, 0.1, 0.05}, spec);
  o.expect(b0.has_value(), "gamma 0: no negative beta on grid");
  const double g = gc - 1e-6;
  if (!(g < stability::gamma_critical())) {
    o.expect(false, "perturbed gamma_c above closed form");
    return;
  }
  const auto bt = stability::find_negative_beta(g, {1e-1, 1e-2, 1e-3, 1e-4}, spec);
  o.expect(bt.has_value(), "gamma_c - 1e-6: no negative beta on grid");
  if (bt) {
    const double near = stability::trial_symbol_integral(*bt, g, spec);
    const double ref = stability::trial_symbol_integral(*bt, 0.0, spec);
    o.expect(near < 0.0 && std::abs(near) <= 1e-4 * std::abs(ref),
             describe("integral at gamma_c - 1e-6", near, 0.0));
  }
}

const std::vector<NamedCheck> &registry() {
  static const std::vector<NamedCheck> checks{
      {"thresholds_closed_form", VerifyLevel::fast, check_thresholds},
      {"threshold_bisection", VerifyLevel::fast, check_bisection},
      {"symbol_at_zero", VerifyLevel::fast, check_symbol_at_zero},
      {"symbol_min_sign", VerifyLevel::fast, check_symbol_sign},
      {"bessel_k2_reference", VerifyLevel::fast, check_bessel_k2},
      {"macdonald_imag_order_reference", VerifyLevel::fast, check_macdonald_imag},
      {"momentum_closed_forms", VerifyLevel::fast, check_momentum_closed_forms},
      {"diagonalized_vs_momentum", VerifyLevel::fast, check_diagonalized},
      {"mellin_closed_form", VerifyLevel::fast, check_mellin},
      {"trial_symbol_integral", VerifyLevel::fast, check_trial_integral},
      {"position_vs_momentum", VerifyLevel::full, check_position_vs_momentum},
      {"yukawa_identity", VerifyLevel::full, check_yukawa},
      {"position_closed_forms", VerifyLevel::full, check_position_closed_forms},
      {"hardy_rellich_battery", VerifyLevel::full, check_hardy_battery},
      {"sandwich_battery", VerifyLevel::full, check_sandwich_battery},
      {"coercive_positivity_battery", VerifyLevel::full, check_coercive_battery},
      {"collapse_sign", VerifyLevel::full, check_collapse_sign},
      {"collapse_c2_extended", VerifyLevel::full, check_collapse_c2},
      {"collapse_lambda_independence", VerifyLevel::full, check_lambda_independence},
      {"phi_zero_linear_bound", VerifyLevel::full, check_zero_linear},
      {"find_negative_beta", VerifyLevel::full, check_negative_beta},
  };
  return checks;
}

bool included(const NamedCheck &c, VerifyLevel level) {
  return level == VerifyLevel::full || c.level == VerifyLevel::fast;
}

} // namespace

std::vector<std::string> verify_check_names(VerifyLevel level) {
  std::vector<std::string> out;
  for (const auto &c : registry())
    if (included(c, level))
      out.push_back(c.name);
  return out;
}

std::vector<CheckResult> run_verify(const VerifyOptions &opts) {
  for (const auto &name : opts.only) {
    const auto &reg = registry();
    if (std::none_of(reg.begin(), reg.end(), [&](const auto &c) { return c.name == name; }))
      throw UsageError("unknown verify check '" + name + "'");
  }
  const double gc = stability::gamma_critical() + opts.gamma_c_perturbation;
  std::vector<CheckResult> out;
  for (const auto &c : registry()) {
    if (!included(c, opts.level))
      continue;
    if (!opts.only.empty() &&
        std::find(opts.only.begin(), opts.only.end(), c.name) == opts.only.end())
      continue;
    CheckResult res;
    res.name = c.name;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      c.run(o, gc);
    } catch (const std::exception &e) {
      o.expect(false, std::string("exception: ") + e.what());
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    res.passed = o.passed;
    res.detail = o.detail.str();
    out.push_back(std::move(res));
  }
  return out;
}

int cmd_verify(const VerifyOptions &opts, std::ostream &out) {
  const auto results = run_verify(opts);
  nlohmann::json j;
  j["level"] = std::string(to_string(opts.level));
  nlohmann::json checks = nlohmann::json::array();
  nlohmann::json failed = nlohmann::json::array();
  for (const auto &r : results) {
    nlohmann::json c{{"name", r.name}, {"passed", r.passed}};
    if (!r.passed) {
      c["detail"] = r.detail;
      failed.push_back(r.name);
    }
    checks.push_back(c);
  }
  j["checks"] = checks;
  j["failed"] = failed;
  j["passed"] = failed.empty();
  out << j.dump(2) << '\n';
  return failed.empty() ? exit_ok : exit_verify_failed;
}

} // namespace zr3b::cli
