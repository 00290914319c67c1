#include "zr3b/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace zr3b;

int main(int argc, char **argv) {
  CLI::App app{"Regularized three-boson zero-range quadratic form: thresholds, "
               "form evaluation, collapse sweeps and verification"};
  app.require_subcommand(0, 1);

  std::string config_path;
  bool dump = false;
  std::string output_path;
  double abs_tol = 0, rel_tol = 0;
  int max_sub = 0;
  app.add_option("--config", config_path, "Read settings from a sectioned config file");
  app.add_flag("--dump-config", dump, "Print the effective config and exit");
  auto *o_output = app.add_option("-o,--output", output_path, "Write results to a file");
  auto *o_abs = app.add_option("--abs-tol", abs_tol, "Quadrature absolute tolerance");
  auto *o_rel = app.add_option("--rel-tol", rel_tol, "Quadrature relative tolerance");
  auto *o_sub = app.add_option("--max-subdivisions", max_sub, "Quadrature panel budget");
  std::string format;
  auto *o_format = app.add_option("--format", format, "csv or json (form only)")
                       ->check(CLI::IsMember({"csv", "json"}));

  double gamma = 0, lambda = 0, inv_a = 0, theta_b = 1, x_max = 0;
  int samples = 0, n_max = 0;
  std::string charge, rep, level, footer;
  double perturb = 0;

  auto *thr = app.add_subcommand("thresholds", "gamma_c, its bisection estimate and gamma'_c");

  auto *sym = app.add_subcommand("symbol", "Tabulate S(x) as CSV");
  auto *s_gamma = sym->add_option("--gamma", gamma)->required();
  auto *s_xmax = sym->add_option("--xmax", x_max)->required();
  auto *s_samples = sym->add_option("--samples", samples)->required();

  auto *form = app.add_subcommand("form", "Evaluate the form components of one charge");
  auto *f_charge = form->add_option("--charge", charge, "gaussian:<s> or fbeta:<b>")->required();
  auto *f_gamma = form->add_option("--gamma", gamma)->required();
  auto *f_lambda = form->add_option("--lambda", lambda)->required();
  auto *f_rep = form->add_option("--rep", rep)
                    ->check(CLI::IsMember({"momentum", "position", "diagonalized"}));
  auto *f_inv_a = form->add_option("--inv-a", inv_a, "1/a");
  auto *f_theta = form->add_option("--theta-b", theta_b, "indicator cutoff b");

  auto *col = app.add_subcommand("collapse", "Scaling sweep n = 1..nmax, CSV plus JSON footer");
  auto *c_charge = col->add_option("--charge", charge, "fbeta:<b>")->required();
  auto *c_gamma = col->add_option("--gamma", gamma)->required();
  auto *c_lambda = col->add_option("--lambda", lambda)->required();
  auto *c_nmax = col->add_option("--nmax", n_max)->required();
  auto *c_inv_a = col->add_option("--inv-a", inv_a, "1/a");
  auto *c_theta = col->add_option("--theta-b", theta_b, "indicator cutoff b");
  auto *c_footer = col->add_option("--footer", footer, "Write the JSON footer here instead of stderr");

  auto *ver = app.add_subcommand("verify", "Run the check batteries");
  auto *v_level = ver->add_option("--level", level)->check(CLI::IsMember({"fast", "full"}));
  auto *v_perturb = ver->add_option("--perturb-gamma-c", perturb,
                                    "Fault injection: shift gamma_c before checking");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? cli::exit_ok : cli::exit_usage;
  }

  try {
    cli::RunConfig cfg;
    if (!config_path.empty())
      cfg = cli::load_config(config_path);
    else if (app.get_subcommands().empty()) {
      std::cerr << app.help();
      return cli::exit_usage;
    }

    if (o_output->count())
      cfg.output_path = output_path;
    if (o_abs->count())
      cfg.quadrature.abs_tol = abs_tol;
    if (o_rel->count())
      cfg.quadrature.rel_tol = rel_tol;
    if (o_sub->count())
      cfg.quadrature.max_subdivisions = max_sub;
    if (o_format->count())
      cfg.output_format = cli::parse_format(format);

    auto set_theta = [&](CLI::Option *opt) {
      if (opt->count())
        cfg.form_params.theta = charges::ThetaProfile::indicator(theta_b);
    };

    if (*thr) {
      cfg.command = cli::Command::thresholds;
    } else if (*sym) {
      cfg.command = cli::Command::symbol;
      if (s_gamma->count()) cfg.form_params.gamma = gamma;
      if (s_xmax->count()) cfg.x_max = x_max;
      if (s_samples->count()) cfg.samples = samples;
    } else if (*form) {
      cfg.command = cli::Command::form;
      if (f_charge->count()) cfg.charge_spec = charge;
      if (f_gamma->count()) cfg.form_params.gamma = gamma;
      if (f_lambda->count()) cfg.form_params.lambda = lambda;
      if (f_rep->count()) cfg.rep = cli::parse_representation(rep);
      if (f_inv_a->count()) cfg.form_params.inv_scattering_length = inv_a;
      set_theta(f_theta);
    } else if (*col) {
      cfg.command = cli::Command::collapse;
      if (c_charge->count()) cfg.charge_spec = charge;
      if (c_gamma->count()) cfg.form_params.gamma = gamma;
      if (c_lambda->count()) cfg.form_params.lambda = lambda;
      if (c_nmax->count()) cfg.n_max = n_max;
      if (c_inv_a->count()) cfg.form_params.inv_scattering_length = inv_a;
      set_theta(c_theta);
      if (c_footer->count()) cfg.footer_path = footer;
    } else if (*ver) {
      cfg.command = cli::Command::verify;
      if (v_level->count()) cfg.level = cli::parse_level(level);
      if (v_perturb->count()) cfg.gamma_c_perturbation = perturb;
    }

    if (dump) {
      cfg.validate();
      std::cout << cli::dump_config(cfg);
      return cli::exit_ok;
    }
    return cli::run(cfg, std::cout, std::cerr);
  } catch (const std::exception &e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return cli::exit_usage;
  }
}
