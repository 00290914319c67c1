#include "zr3b/cli.hpp"

#include "zr3b/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace zr3b::cli {

namespace pt = boost::property_tree;

namespace {

template <class E, std::size_t N>
E lookup(std::string_view s, const std::array<std::pair<std::string_view, E>, N> &table,
         const char *what) {
  for (const auto &[name, value] : table)
    if (name == s)
      return value;
  throw UsageError(std::string("unknown ") + what + " '" + std::string(s) + "'");
}

template <class E, std::size_t N>
std::string_view name_of(E e, const std::array<std::pair<std::string_view, E>, N> &table) {
  for (const auto &[name, value] : table)
    if (value == e)
      return name;
  return "?";
}

constexpr std::array<std::pair<std::string_view, Command>, 5> commands{{
    {"thresholds", Command::thresholds},
    {"symbol", Command::symbol},
    {"form", Command::form},
    {"collapse", Command::collapse},
    {"verify", Command::verify},
}};
constexpr std::array<std::pair<std::string_view, Representation>, 3> reps{{
    {"momentum", Representation::momentum},
    {"position", Representation::position},
    {"diagonalized", Representation::diagonalized},
}};
constexpr std::array<std::pair<std::string_view, VerifyLevel>, 2> levels{{
    {"fast", VerifyLevel::fast},
    {"full", VerifyLevel::full},
}};
constexpr std::array<std::pair<std::string_view, OutputFormat>, 2> formats{{
    {"csv", OutputFormat::csv},
    {"json", OutputFormat::json},
}};
constexpr std::array<std::pair<std::string_view, quad::Scheme>, 2> schemes{{
    {"gauss_kronrod", quad::Scheme::gauss_legendre_adaptive},
    {"tanh_sinh", quad::Scheme::double_exponential},
}};

double parse_double(const std::string &s, const std::string &key) {
  double v = 0.0;
  const char *first = s.data(), *last = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw UsageError("config key '" + key + "': not a number: '" + s + "'");
  return v;
}

int parse_int(const std::string &s, const std::string &key) {
  int v = 0;
  const char *first = s.data(), *last = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw UsageError("config key '" + key + "': not an integer: '" + s + "'");
  return v;
}

std::vector<double> parse_list(const std::string &s, const std::string &key) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto a = item.find_first_not_of(' ');
    const auto b = item.find_last_not_of(' ');
    if (a == std::string::npos)
      throw UsageError("config key '" + key + "': empty list entry");
    out.push_back(parse_double(item.substr(a, b - a + 1), key));
  }
  return out;
}

std::string join(const std::vector<double> &v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i)
      out += ", ";
    out += format_double(v[i]);
  }
  return out;
}

} // namespace

std::string_view to_string(Command c) { return name_of(c, commands); }
std::string_view to_string(Representation r) { return name_of(r, reps); }
std::string_view to_string(VerifyLevel l) { return name_of(l, levels); }
std::string_view to_string(OutputFormat f) { return name_of(f, formats); }
Command parse_command(std::string_view s) { return lookup(s, commands, "command"); }
Representation parse_representation(std::string_view s) {
  return lookup(s, reps, "representation");
}
VerifyLevel parse_level(std::string_view s) { return lookup(s, levels, "verify level"); }
OutputFormat parse_format(std::string_view s) { return lookup(s, formats, "format"); }

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc())
    throw std::runtime_error("format_double failed");
  return std::string(buf.data(), ptr);
}

void RunConfig::validate() const {
  try {
    form_params.validate();
    quadrature.validate();
    if (command == Command::form || command == Command::collapse)
      (void)charges::parse_charge_spec(charge_spec);
  } catch (const DomainError &e) {
    throw UsageError(e.what());
  }
  if (command == Command::symbol) {
    if (samples < 2)
      throw UsageError("symbol: samples must be >= 2");
    if (!(x_max > 0.0) || !std::isfinite(x_max))
      throw UsageError("symbol: x_max must be positive");
  }
  if (command == Command::collapse) {
    if (n_max < 4)
      throw UsageError("collapse: nmax must be >= 4");
    if (charge_spec.rfind("fbeta:", 0) != 0)
      throw UsageError("collapse: charge must be fbeta:<beta>");
  }
}

std::string dump_config(const RunConfig &cfg) {
  pt::ptree tree;
  tree.put("run.command", std::string(to_string(cfg.command)));
  tree.put("run.charge", cfg.charge_spec);
  tree.put("run.format", std::string(to_string(cfg.output_format)));
  if (cfg.output_path)
    tree.put("run.output", *cfg.output_path);

  const auto &fp = cfg.form_params;
  tree.put("form.gamma", format_double(fp.gamma));
  tree.put("form.lambda", format_double(fp.lambda));
  tree.put("form.inv_a", format_double(fp.inv_scattering_length));
  tree.put("form.theta_b", format_double(fp.theta.b()));
  if (fp.theta.kind() == charges::ThetaKind::custom_sampled) {
    tree.put("form.theta_s", join(fp.theta.sample_s()));
    tree.put("form.theta_values", join(fp.theta.sample_theta()));
  }
  tree.put("form.rep", std::string(to_string(cfg.rep)));

  const auto &q = cfg.quadrature;
  tree.put("quadrature.abs_tol", format_double(q.abs_tol));
  tree.put("quadrature.rel_tol", format_double(q.rel_tol));
  tree.put("quadrature.max_subdivisions", q.max_subdivisions);
  tree.put("quadrature.truncation_radius", format_double(q.truncation_radius));
  tree.put("quadrature.scheme", std::string(name_of(q.scheme, schemes)));

  tree.put("symbol.x_max", format_double(cfg.x_max));
  tree.put("symbol.samples", cfg.samples);
  tree.put("collapse.n_max", cfg.n_max);
  if (cfg.footer_path)
    tree.put("collapse.footer", *cfg.footer_path);
  tree.put("verify.level", std::string(to_string(cfg.level)));
  if (cfg.gamma_c_perturbation != 0.0)
    tree.put("verify.gamma_c_perturbation", format_double(cfg.gamma_c_perturbation));

  std::ostringstream os;
  pt::write_ini(os, tree);
  return os.str();
}

RunConfig parse_config(const std::string &text) {
  pt::ptree tree;
  std::istringstream is(text);
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error &e) {
    throw UsageError(std::string("config: ") + e.message() + " at line " +
                     std::to_string(e.line()));
  }

  static const std::array<std::pair<std::string_view, std::vector<std::string_view>>, 6>
      known{{
          {"run", {"command", "charge", "format", "output"}},
          {"form", {"gamma", "lambda", "inv_a", "theta_b", "theta_s", "theta_values", "rep"}},
          {"quadrature",
           {"abs_tol", "rel_tol", "max_subdivisions", "truncation_radius", "scheme"}},
          {"symbol", {"x_max", "samples"}},
          {"collapse", {"n_max", "footer"}},
          {"verify", {"level", "gamma_c_perturbation"}},
      }};
  for (const auto &[section, body] : tree) {
    const auto it = std::find_if(known.begin(), known.end(),
                                 [&](const auto &k) { return k.first == section; });
    if (it == known.end())
      throw UsageError("config: unknown section [" + section + "]");
    if (!body.data().empty())
      throw UsageError("config: key '" + section + "' outside a section");
    for (const auto &[key, value] : body) {
      if (std::find(it->second.begin(), it->second.end(), key) == it->second.end())
        throw UsageError("config: unknown key '" + key + "' in [" + section + "]");
    }
  }

  RunConfig cfg;
  auto get = [&](const std::string &path) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(path, '.')))
      return *v;
    return std::nullopt;
  };
  auto num = [&](const std::string &path, double &dst) {
    if (auto v = get(path))
      dst = parse_double(*v, path);
  };
  auto integer = [&](const std::string &path, int &dst) {
    if (auto v = get(path))
      dst = parse_int(*v, path);
  };

  if (auto v = get("run.command"))
    cfg.command = parse_command(*v);
  if (auto v = get("run.charge"))
    cfg.charge_spec = *v;
  if (auto v = get("run.format"))
    cfg.output_format = parse_format(*v);
  if (auto v = get("run.output"))
    cfg.output_path = *v;

  auto &fp = cfg.form_params;
  num("form.gamma", fp.gamma);
  num("form.lambda", fp.lambda);
  num("form.inv_a", fp.inv_scattering_length);
  double theta_b = 1.0;
  num("form.theta_b", theta_b);
  try {
    const auto s = get("form.theta_s"), th = get("form.theta_values");
    if (s.has_value() != th.has_value())
      throw UsageError("config: theta_s and theta_values go together");
    if (s)
      fp.theta = charges::ThetaProfile::custom(theta_b, parse_list(*s, "form.theta_s"),
                                               parse_list(*th, "form.theta_values"));
    else
      fp.theta = charges::ThetaProfile::indicator(theta_b);
  } catch (const DomainError &e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  if (auto v = get("form.rep"))
    cfg.rep = parse_representation(*v);

  auto &q = cfg.quadrature;
  num("quadrature.abs_tol", q.abs_tol);
  num("quadrature.rel_tol", q.rel_tol);
  integer("quadrature.max_subdivisions", q.max_subdivisions);
  num("quadrature.truncation_radius", q.truncation_radius);
  if (auto v = get("quadrature.scheme"))
    q.scheme = lookup(*v, schemes, "quadrature scheme");

  num("symbol.x_max", cfg.x_max);
  integer("symbol.samples", cfg.samples);
  integer("collapse.n_max", cfg.n_max);
  if (auto v = get("collapse.footer"))
    cfg.footer_path = *v;
  if (auto v = get("verify.level"))
    cfg.level = parse_level(*v);
  num("verify.gamma_c_perturbation", cfg.gamma_c_perturbation);
  return cfg;
}

RunConfig load_config(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw UsageError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

bool equivalent(const RunConfig &a, const RunConfig &b) {
  const auto &fa = a.form_params, &fb = b.form_params;
  const auto &qa = a.quadrature, &qb = b.quadrature;
  return a.command == b.command && a.charge_spec == b.charge_spec &&
         a.output_format == b.output_format && a.output_path == b.output_path &&
         fa.gamma == fb.gamma && fa.lambda == fb.lambda &&
         fa.inv_scattering_length == fb.inv_scattering_length &&
         fa.theta.kind() == fb.theta.kind() && fa.theta.b() == fb.theta.b() &&
         fa.theta.sample_s() == fb.theta.sample_s() &&
         fa.theta.sample_theta() == fb.theta.sample_theta() && a.rep == b.rep &&
         qa.abs_tol == qb.abs_tol && qa.rel_tol == qb.rel_tol &&
         qa.max_subdivisions == qb.max_subdivisions &&
         qa.truncation_radius == qb.truncation_radius && qa.scheme == qb.scheme &&
         a.x_max == b.x_max && a.samples == b.samples && a.n_max == b.n_max &&
         a.footer_path == b.footer_path && a.level == b.level &&
         a.gamma_c_perturbation == b.gamma_c_perturbation;
}

} // namespace zr3b::cli
