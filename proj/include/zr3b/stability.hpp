#pragma once

#include "zr3b/momentum_forms.hpp"
#include "zr3b/quadrature.hpp"

#include <optional>
#include <string>
#include <vector>

namespace zr3b::stability {

/// 4/3 - sqrt3/pi
double gamma_critical();
/// 2 - sqrt3/pi
double gamma_prime_critical();

struct SymbolMinimum {
  double x_min = 0.0;
  double s_min = 0.0;
};

/// Minimum of S(., gamma) on [0, x_max]: grid scan then golden section
/// around the best grid point. S is even, so [0, x_max] covers [-x_max, x_max].
SymbolMinimum min_symbol(double gamma, double x_max = 50.0, int grid = 2001);

/// Thrown when a bisection bracket has no sign change.
class BracketError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline constexpr double threshold_bracket_lo = 0.5;
inline constexpr double threshold_bracket_hi = 1.5;

/// Bisection on gamma -> s_min(gamma) over [0.5, 1.5].
double threshold_from_symbol(double tol, double x_max = 50.0);

/// 48 pi^2 int |f_beta^#(x)|^2 S(x) dx evaluated from the closed form
/// sqrt(2/pi) K_{i x/beta}(1)/beta, with adaptive quadrature in nu = x/beta.
double trial_symbol_integral(double beta, double gamma,
                             const quad::QuadratureSpec &spec);

/// Same integral through the sampled Mellin transform of trial_fbeta(beta).
double trial_symbol_integral_sampled(double beta, double gamma,
                                     const quad::QuadratureSpec &spec);

struct SweepRecord {
  int n = 0;
  double beta = 0.0;
  double gamma = 0.0;
  double lambda = 0.0;
  forms::FormBreakdown breakdown;
  double total_over_n2 = 0.0;
  bool ok = true;
  std::string error; // set when ok is false
};

/// phi_total of scale_charge(trial_fbeta(beta), n) for each n. Records are
/// computed on ZR3B_THREADS worker threads (default 1) and returned in the
/// order of n_list. A failing record is marked and the sweep continues.
std::vector<SweepRecord> collapse_sweep(double beta,
                                        const forms::FormParams &params,
                                        const std::vector<int> &n_list,
                                        const quad::QuadratureSpec &spec);

/// Worker count from ZR3B_THREADS, clamped to [1, 64].
int sweep_threads();

struct ScalingFit {
  double c2 = 0.0;
  double c1 = 0.0;
  double residual = 0.0; // sqrt of the sum of squared misfits
  int used = 0;
};

/// Least squares total = c2 n^2 + c1 n over the successful records.
/// Throws DomainError with fewer than 4 of them.
ScalingFit fit_scaling(const std::vector<SweepRecord> &records);

struct CollapseVerdict {
  bool decreasing = false; // last 5 successful totals strictly decreasing
  bool deep = false;       // last total < -100 |total at the first record|
  bool collapse() const { return decreasing && deep; }
};

CollapseVerdict collapse_verdict(const std::vector<SweepRecord> &records);

/// Largest beta on the grid whose trial symbol integral is negative, or
/// nullopt if none is.
std::optional<double> find_negative_beta(double gamma,
                                         const std::vector<double> &beta_grid,
                                         const quad::QuadratureSpec &spec);

} // namespace zr3b::stability
