// One line per acceptance criterion: "criterion N: PASS|FAIL <detail>".
// With --criterion N only that one runs; the exit status is 0 iff every
// selected criterion passed.

#include "zr3b/cli.hpp"
#include "zr3b/position_forms.hpp"
#include "zr3b/specfun.hpp"
#include "zr3b/stability.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>

using namespace zr3b;
using std::numbers::pi;
using std::numbers::sqrt3;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream note;

  void require(bool ok, const std::string &what) {
    if (!ok) {
      if (!pass)
        note << "; ";
      note << what;
      pass = false;
    }
  }
};

std::string num(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

const quad::QuadratureSpec mspec{};

quad::QuadratureSpec pspec() {
  quad::QuadratureSpec s;
  s.rel_tol = 1e-7;
  return s;
}

forms::FormParams params(double gamma, double lambda) {
  forms::FormParams p;
  p.gamma = gamma;
  p.lambda = lambda;
  return p;
}

void thresholds(Verdict &v) {
  std::ostringstream os;
  cli::cmd_thresholds(os);
  const auto j = nlohmann::json::parse(os.str());
  const double gc = j["gamma_c"], gpc = j["gamma_prime_c"], gb = j["gamma_c_bisection"];
  v.require(std::abs(gc - 0.782004) <= 5e-7, "gamma_c " + num(gc));
  v.require(std::abs(gpc - 1.44867) <= 5e-6, "gamma'_c " + num(gpc));
  v.require(std::abs(gb - gc) <= 1e-8, "bisection " + num(gb));
  v.note << "gamma_c " << num(gc) << " gamma'_c " << num(gpc) << " |bisection - closed| "
         << std::abs(gb - gc);
}

void symbol(Verdict &v) {
  const double gc = stability::gamma_critical();
  double worst = 0.0;
  for (double g : {0.0, 0.5, gc, 1.0, 2.0})
    worst = std::max(worst, std::abs(specfun::symbol_S(0.0, {g}) - 0.5 * pi * (g - gc)));
  v.require(worst <= 1e-12, "S(0) deviation " + num(worst));
  for (double g : {0.8, 1.0, 1.5, 3.0}) {
    const double m = stability::min_symbol(g).s_min;
    v.require(m >= 0.0, "min S at gamma " + num(g) + " = " + num(m));
  }
  for (double g : {0.0, 0.3, 0.6, 0.75}) {
    const double m = stability::min_symbol(g).s_min;
    v.require(m < 0.0, "min S at gamma " + num(g) + " = " + num(m));
  }
  if (v.pass)
    v.note << "max |S(0) - (pi/2)(gamma - gamma_c)| " << worst;
}

void cross_representation(Verdict &v) {
  double worst = 0.0;
  auto cmp = [&](double got, double want, const std::string &what) {
    const double r = rel(got, want);
    worst = std::max(worst, r);
    v.require(r <= 1e-5, what + " rel " + num(r));
  };
  for (const char *cs : {"gaussian:1", "fbeta:1"}) {
    const auto f = charges::parse_charge_spec(cs);
    const std::string tag = cs;
    const auto dz = forms::phi_diagonalized(f, 1.0, mspec);
    cmp(dz.diag, forms::phi_diag(f, 0.0, mspec).value, tag + " diagonalized diag");
    cmp(dz.off, forms::phi_off(f, 0.0, mspec).value, tag + " diagonalized off");
    cmp(dz.reg, forms::phi_reg(f, 1.0, mspec).value, tag + " diagonalized reg");
    for (double lam : {0.5, 1.0, 4.0}) {
      const std::string at = tag + " lambda " + num(lam);
      cmp(forms::phi_diag_position(f, lam, pspec()).value, forms::phi_diag(f, lam, mspec).value,
          at + " position diag");
      cmp(forms::phi_off_position(f, lam, pspec()).value, forms::phi_off(f, lam, mspec).value,
          at + " position off");
    }
    cmp(forms::phi_reg_position(f, 1.0, pspec()).value, forms::phi_reg(f, 1.0, mspec).value,
        tag + " position reg");
  }
  if (v.pass)
    v.note << "worst relative deviation " << worst;
}

void yukawa(Verdict &v) {
  double worst = 0.0;
  for (double lam : {0.25, 1.0, 4.0})
    for (double y : {0.5, 1.0, 2.0}) {
      const double r = forms::yukawa_identity_residual(lam, y, mspec);
      worst = std::max(worst, r);
      v.require(r <= 1e-6, "lambda " + num(lam) + " y " + num(y) + " residual " + num(r));
    }
  if (v.pass)
    v.note << "max residual " << worst;
}

void collapse(Verdict &v) {
  std::vector<int> ns;
  for (int n = 1; n <= 32; ++n)
    ns.push_back(n);
  const double oracle = stability::trial_symbol_integral(0.3, 0.5, mspec);

  std::vector<double> c2;
  for (double lam : {1.0, 5.0, 25.0}) {
    const auto rs = stability::collapse_sweep(0.3, params(0.5, lam), ns, mspec);
    c2.push_back(stability::fit_scaling(rs).c2);
    if (lam == 1.0)
      v.require(stability::collapse_verdict(rs).decreasing, "last 5 totals not strictly decreasing");
  }
  v.require(c2[0] < 0.0, "c2(gamma 0.5) = " + num(c2[0]) + " not negative");
  v.require(rel(c2[0], oracle) <= 0.01,
            "c2 " + num(c2[0]) + " vs diagonalized " + num(oracle) + " rel " + num(rel(c2[0], oracle)));
  const auto above = stability::collapse_sweep(0.3, params(2.0, 1.0), ns, mspec);
  const double c2_above = stability::fit_scaling(above).c2;
  v.require(c2_above > 0.0, "c2(gamma 2) = " + num(c2_above) + " not positive");
  for (std::size_t i = 0; i < c2.size(); ++i)
    for (std::size_t j = i + 1; j < c2.size(); ++j)
      v.require(rel(c2[i], c2[j]) <= 0.02,
                "c2 across lambda " + num(c2[i]) + " vs " + num(c2[j]));
  if (v.pass)
    v.note << "c2 " << num(c2[0]) << " oracle " << num(oracle);
}

void bounds(Verdict &v) {
  const auto battery = cli::mixture_battery(20, cli::battery_seed);
  int hardy = 0, sandwich = 0, positive = 0;
  for (std::size_t i = 0; i < battery.size(); ++i) {
    const auto hr = forms::hardy_rellich(battery[i], mspec);
    v.require(hr.gap() >= 0.0, "Hardy gap " + num(hr.gap()) + " at charge " + std::to_string(i));
    ++hardy;
    for (double g : {0.5, 1.0, 2.0, 3.0})
      for (double lam : {1.0, 10.0}) {
        const auto p = cli::battery_params(g, lam);
        const auto sb = forms::sandwich_bounds(battery[i], p, mspec);
        ++sandwich;
        v.require(sb.holds(), "sandwich at charge " + std::to_string(i) + " gamma " + num(g) +
                                  " lambda " + num(lam));
        if (g > stability::gamma_prime_critical() &&
            forms::coercive_lambda_threshold(p).exceeded_by(lam)) {
          ++positive;
          v.require(sb.value > 0.0, "phi_total " + num(sb.value) + " at charge " +
                                        std::to_string(i) + " gamma " + num(g));
        }
      }
  }
  v.require(positive > 0, "positivity certificate never exercised");
  if (v.pass)
    v.note << hardy << " Hardy gaps, " << sandwich << " sandwiches, " << positive
           << " positivity cases";
}

void closed_forms(Verdict &v) {
  const auto g = charges::gaussian_charge(1.0);
  const double diag = 12 * sqrt3 * pi * pi, reg = 24 * pi * pi;
  const double dm = forms::phi_diag(g, 0.0, mspec).value;
  const double dd = forms::phi_diagonalized(g, 1.0, mspec).diag;
  const double rm = forms::phi_reg(g, 1.0, mspec).value;
  const double rp = forms::phi_reg_position(g, 1.0, mspec).value;
  v.require(rel(dm, diag) <= 1e-6, "diag momentum " + num(dm));
  v.require(rel(dd, diag) <= 1e-6, "diag diagonalized " + num(dd));
  v.require(rel(rm, reg) <= 1e-6, "reg momentum " + num(rm));
  v.require(rel(rp, reg) <= 1e-6, "reg position " + num(rp));
  if (v.pass)
    v.note << "worst rel " << std::max({rel(dm, diag), rel(dd, diag), rel(rm, reg), rel(rp, reg)});
}

void verify_full(Verdict &v) {
  std::ostringstream os;
  const int code = cli::cmd_verify({cli::VerifyLevel::full, 0.0, {}}, os);
  const auto j = nlohmann::json::parse(os.str());
  v.require(code == cli::exit_ok, "verify exit code " + std::to_string(code));
  std::set<std::string> names;
  for (const auto &c : j["checks"]) {
    names.insert(c["name"].get<std::string>());
    if (!c["passed"].get<bool>())
      v.require(false, "check " + c["name"].get<std::string>() + " failed");
  }
  // batteries behind criteria 2-7
  for (const char *need :
       {"symbol_at_zero", "symbol_min_sign", "diagonalized_vs_momentum", "position_vs_momentum",
        "yukawa_identity", "collapse_sign", "collapse_c2_extended", "collapse_lambda_independence",
        "hardy_rellich_battery", "sandwich_battery", "coercive_positivity_battery",
        "momentum_closed_forms", "position_closed_forms"})
    v.require(names.count(need) == 1, std::string("missing check ") + need);
  v.require(names.size() >= 12, "only " + std::to_string(names.size()) + " checks");
  if (v.pass)
    v.note << names.size() << " checks passed";
}

struct Criterion {
  int id;
  double budget_s;
  std::function<void(Verdict &)> run;
};

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  app.add_option("--criterion", only, "Run a single criterion (1-8)")->check(CLI::Range(1, 8));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> all{
      {1, 5, thresholds},       {2, 10, symbol},  {3, 300, cross_representation},
      {4, 60, yukawa},          {5, 600, collapse}, {6, 600, bounds},
      {7, 60, closed_forms},    {8, 900, verify_full},
  };

  bool ok = true;
  for (const auto &c : all) {
    if (only && c.id != only)
      continue;
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(v);
    } catch (const std::exception &e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    v.require(secs < c.budget_s, "runtime " + num(secs) + " s over budget " + num(c.budget_s) + " s");
    std::cout << "criterion " << c.id << ": " << (v.pass ? "PASS" : "FAIL") << " (" << num(secs)
              << " s) " << v.note.str() << std::endl;
    ok = ok && v.pass;
  }
  return ok ? 0 : 1;
}
