#include "zr3b/cli.hpp"

#include "zr3b/errors.hpp"
#include "zr3b/position_forms.hpp"
#include "zr3b/specfun.hpp"
#include "zr3b/stability.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <random>

namespace zr3b::cli {

using nlohmann::json;

namespace {

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void require_agreement_flag(json &j, double a, double b, double tol) {
  j["agreement"] = std::abs(a - b) <= tol;
}

} // namespace

int cmd_thresholds(std::ostream &out) {
  const double gc = stability::gamma_critical();
  const double gb = stability::threshold_from_symbol(1e-10);
  json j;
  j["gamma_c"] = gc;
  j["gamma_c_bisection"] = gb;
  j["gamma_prime_c"] = stability::gamma_prime_critical();
  require_agreement_flag(j, gc, gb, 1e-8);
  out << j.dump(2) << '\n';
  return exit_ok;
}

int cmd_symbol(double gamma, double x_max, int samples, std::ostream &out) {
  if (samples < 2)
    throw UsageError("symbol: samples must be >= 2");
  if (!(x_max > 0.0) || !std::isfinite(x_max))
    throw UsageError("symbol: x_max must be positive");
  const specfun::SymbolParams sp{gamma};
  out << "x,S\n";
  for (int k = 0; k < samples; ++k) {
    // last row lands exactly on x_max
    const double x = k == samples - 1 ? x_max : x_max * k / (samples - 1);
    out << g17(x) << ',' << g17(specfun::symbol_S(x, sp)) << '\n';
  }
  return out ? exit_ok : exit_convergence;
}

int cmd_form(const RunConfig &cfg, std::ostream &out) {
  const auto f = charges::parse_charge_spec(cfg.charge_spec);
  const auto &fp = cfg.form_params;
  const auto &spec = cfg.quadrature;
  fp.validate();

  forms::FormBreakdown b;
  json err;
  json extra = json::object();
  switch (cfg.rep) {
  case Representation::momentum: {
    const auto d = forms::phi_diag(f, fp.lambda, spec);
    const auto o = forms::phi_off(f, fp.lambda, spec);
    const auto r = forms::phi_reg(f, fp.gamma, spec);
    const auto z = forms::phi_zero(f, fp, spec);
    b = {d.value, o.value, r.value, z.value, 0.0, 0.0};
    err = {{"diag", d.err_estimate}, {"off", o.err_estimate},
           {"reg", r.err_estimate}, {"zero", z.err_estimate}};
    break;
  }
  case Representation::position: {
    if (!(fp.lambda > 0.0))
      throw UsageError("position representation needs lambda > 0");
    const auto d = forms::phi_diag_position(f, fp.lambda, spec);
    const auto o = forms::phi_off_position(f, fp.lambda, spec);
    const auto r = forms::phi_reg_position(f, fp.gamma, spec);
    const auto z = forms::phi_zero(f, fp, spec);
    b = {d.value, o.value, r.value, z.value, 0.0, 0.0};
    err = {{"diag", d.err_estimate}, {"off", o.err_estimate},
           {"reg", r.err_estimate}, {"zero", z.err_estimate}};
    break;
  }
  case Representation::diagonalized: {
    if (fp.lambda != 0.0)
      throw UsageError("diagonalized representation needs lambda = 0");
    const auto d = forms::phi_diagonalized(f, fp.gamma, spec);
    const auto z = forms::phi_zero(f, fp, spec);
    b = {d.diag, d.off, d.reg, z.value, 0.0, 0.0};
    err = {{"diag", d.err_estimate}, {"off", d.err_estimate},
           {"reg", d.err_estimate}, {"zero", z.err_estimate}};
    break;
  }
  }
  b.total = b.diag + b.off + b.reg + b.zero;
  for (const auto &[k, v] : err.items())
    b.err_estimate += v.get<double>();

  if (cfg.output_format == OutputFormat::csv) {
    out << "rep,diag,off,reg,zero,total,err_estimate\n"
        << to_string(cfg.rep) << ',' << g17(b.diag) << ',' << g17(b.off) << ','
        << g17(b.reg) << ',' << g17(b.zero) << ',' << g17(b.total) << ','
        << g17(b.err_estimate) << '\n';
    return exit_ok;
  }
  json j;
  j["charge"] = cfg.charge_spec;
  j["rep"] = std::string(to_string(cfg.rep));
  j["gamma"] = fp.gamma;
  j["lambda"] = fp.lambda;
  j["inv_a"] = fp.inv_scattering_length;
  j["theta_b"] = fp.theta.b();
  j["diag"] = b.diag;
  j["off"] = b.off;
  j["reg"] = b.reg;
  j["zero"] = b.zero;
  j["total"] = b.total;
  j["err_estimate"] = b.err_estimate;
  j["component_errors"] = err;
  out << j.dump(2) << '\n';
  return exit_ok;
}

int cmd_collapse(const RunConfig &cfg, std::ostream &csv, std::ostream &footer) {
  if (cfg.n_max < 4)
    throw UsageError("collapse: nmax must be >= 4");
  const auto &spec_str = cfg.charge_spec;
  if (spec_str.rfind("fbeta:", 0) != 0)
    throw UsageError("collapse: charge must be fbeta:<beta>");
  const auto base = charges::parse_charge_spec(spec_str); // validates beta
  const double beta = std::stod(spec_str.substr(6));
  (void)base;

  std::vector<int> ns;
  for (int n = 1; n <= cfg.n_max; ++n)
    ns.push_back(n);
  const auto records =
      stability::collapse_sweep(beta, cfg.form_params, ns, cfg.quadrature);

  csv << "n,diag,off,reg,zero,total,total_over_n2\n";
  json failed = json::array();
  for (const auto &r : records) {
    csv << r.n;
    if (r.ok) {
      const auto &b = r.breakdown;
      csv << ',' << g17(b.diag) << ',' << g17(b.off) << ',' << g17(b.reg) << ','
          << g17(b.zero) << ',' << g17(b.total) << ',' << g17(r.total_over_n2);
    } else {
      csv << ",,,,,,";
      failed.push_back({{"n", r.n}, {"error", r.error}});
    }
    csv << '\n';
  }

  json j;
  j["beta"] = beta;
  j["gamma"] = cfg.form_params.gamma;
  j["lambda"] = cfg.form_params.lambda;
  j["failed_rows"] = failed;
  const auto verdict = stability::collapse_verdict(records);
  j["last5_decreasing"] = verdict.decreasing;
  j["below_100x_first"] = verdict.deep;
  j["verdict"] = verdict.collapse() ? "collapse" : "no-collapse";
  j["c2_diagonalized"] =
      stability::trial_symbol_integral(beta, cfg.form_params.gamma, cfg.quadrature);
  int status = exit_ok;
  try {
    const auto fit = stability::fit_scaling(records);
    j["fit"] = {{"c2", fit.c2}, {"c1", fit.c1}, {"residual", fit.residual},
                {"records", fit.used}};
  } catch (const DomainError &e) {
    j["fit"] = nullptr;
    j["fit_error"] = e.what();
    status = exit_convergence;
  }
  footer << j.dump(2) << '\n';
  return status;
}

int run(const RunConfig &cfg, std::ostream &out, std::ostream &err) {
  try {
    cfg.validate();
    std::ofstream file;
    std::ostream *target = &out;
    if (cfg.output_path) {
      file.open(*cfg.output_path);
      if (!file)
        throw UsageError("cannot open output file '" + *cfg.output_path + "'");
      target = &file;
    }
    int code = exit_ok;
    switch (cfg.command) {
    case Command::thresholds:
      code = cmd_thresholds(*target);
      break;
    case Command::symbol:
      code = cmd_symbol(cfg.form_params.gamma, cfg.x_max, cfg.samples, *target);
      break;
    case Command::form:
      code = cmd_form(cfg, *target);
      break;
    case Command::collapse:
      if (cfg.footer_path) {
        std::ofstream side(*cfg.footer_path);
        if (!side)
          throw UsageError("cannot open footer file '" + *cfg.footer_path + "'");
        code = cmd_collapse(cfg, *target, side);
      } else {
        code = cmd_collapse(cfg, *target, err);
      }
      break;
    case Command::verify:
      code = cmd_verify({cfg.level, cfg.gamma_c_perturbation, {}}, *target);
      break;
    }
    target->flush();
    return code;
  } catch (const UsageError &e) {
    err << "usage error: " << e.what() << '\n';
    return exit_usage;
  } catch (const DomainError &e) {
    err << "usage error: " << e.what() << '\n';
    return exit_usage;
  } catch (const ConvergenceError &e) {
    err << "convergence failure: " << e.what() << " (best " << e.best_estimate()
        << ", err " << e.error_estimate() << ")\n";
    return exit_convergence;
  } catch (const std::exception &e) {
    err << "numerical failure: " << e.what() << '\n';
    return exit_convergence;
  }
}

std::vector<charges::RadialCharge> mixture_battery(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> ncomp(1, 4);
  std::uniform_real_distribution<double> coef(0.1, 1.0), scale(0.3, 3.0);
  std::vector<charges::RadialCharge> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const int m = ncomp(rng);
    std::vector<double> c(m), s(m);
    for (int k = 0; k < m; ++k) {
      c[k] = coef(rng);
      s[k] = scale(rng);
    }
    out.push_back(charges::gaussian_mixture(c, s));
  }
  return out;
}

forms::FormParams battery_params(double gamma, double lambda) {
  forms::FormParams p;
  p.gamma = gamma;
  p.lambda = lambda;
  p.inv_scattering_length = 0.25;
  p.theta = charges::ThetaProfile::indicator(2.0);
  return p;
}

std::vector<int> geometric_n_list(int n_top) {
  std::vector<int> out;
  for (int k = 0;; ++k) {
    const int n = static_cast<int>(std::lround(std::pow(2.0, 0.5 * k)));
    if (n > n_top)
      break;
    if (out.empty() || n > out.back())
      out.push_back(n);
  }
  return out;
}

} // namespace zr3b::cli
