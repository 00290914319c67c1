#pragma once

#include "zr3b/charges.hpp"
#include "zr3b/momentum_forms.hpp"
#include "zr3b/quadrature.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace zr3b::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_verify_failed = 1,
  exit_usage = 2,
  exit_convergence = 3,
};

/// Bad command line or config file.
class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class Command { thresholds, symbol, form, collapse, verify };
enum class OutputFormat { csv, json };
enum class Representation { momentum, position, diagonalized };
enum class VerifyLevel { fast, full };

struct RunConfig {
  Command command = Command::thresholds;
  forms::FormParams form_params;
  std::string charge_spec = "gaussian:1";
  quad::QuadratureSpec quadrature;
  std::optional<std::string> output_path;
  OutputFormat output_format = OutputFormat::json;

  Representation rep = Representation::momentum;
  double x_max = 50.0; // symbol
  int samples = 501;   // symbol
  int n_max = 32;      // collapse
  std::optional<std::string> footer_path; // collapse footer, else stderr
  VerifyLevel level = VerifyLevel::fast;
  double gamma_c_perturbation = 0.0; // verify fault injection

  void validate() const; // throws UsageError
};

std::string_view to_string(Command c);
std::string_view to_string(Representation r);
std::string_view to_string(VerifyLevel l);
std::string_view to_string(OutputFormat f);
Command parse_command(std::string_view s);
Representation parse_representation(std::string_view s);
VerifyLevel parse_level(std::string_view s);
OutputFormat parse_format(std::string_view s);

/// Sectioned `key = value` text. Floats are written round-trip exact.
std::string dump_config(const RunConfig &cfg);
RunConfig parse_config(const std::string &text);
RunConfig load_config(const std::string &path);
bool equivalent(const RunConfig &a, const RunConfig &b);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

int cmd_thresholds(std::ostream &out);
int cmd_symbol(double gamma, double x_max, int samples, std::ostream &out);
int cmd_form(const RunConfig &cfg, std::ostream &out);
int cmd_collapse(const RunConfig &cfg, std::ostream &csv, std::ostream &footer);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  VerifyLevel level = VerifyLevel::fast;
  double gamma_c_perturbation = 0.0;
  std::vector<std::string> only; // empty runs every check of the level
};

std::vector<std::string> verify_check_names(VerifyLevel level);
std::vector<CheckResult> run_verify(const VerifyOptions &opts);
int cmd_verify(const VerifyOptions &opts, std::ostream &out);

/// Dispatches cfg.command, handling output redirection and mapping
/// exceptions to exit codes. Diagnostics go to err.
int run(const RunConfig &cfg, std::ostream &out, std::ostream &err);

/// Seeded positive Gaussian mixtures: 1-4 components, coefficients in
/// (0.1, 1), scales in (0.3, 3).
std::vector<charges::RadialCharge> mixture_battery(int count,
                                                   std::uint64_t seed);
inline constexpr std::uint64_t battery_seed = 20240917;

/// Parameters used by the bound batteries: 1/a = 0.25, theta = 1 on [0, 2).
forms::FormParams battery_params(double gamma, double lambda);

/// Geometric n list 2^{k/2}, k = 0..2 log2(n_top), deduplicated.
std::vector<int> geometric_n_list(int n_top);

} // namespace zr3b::cli
