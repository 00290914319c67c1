#pragma once

#include "zr3b/quadrature.hpp"

#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace zr3b::charges {

enum class DecayClass { none, gaussian, stretched_exponential, mixture };

/// Where a charge lives, used to pick integration windows. Windows are in
/// logarithmic variables: t = ln p for momenta, u = ln y for positions.
struct DecayEnvelope {
  DecayClass rate = DecayClass::none;
  double scale = 1.0;              // length scale (gaussian) or exponent beta
  quad::Window log_momentum{};     // weights p^k |f|^2, k in 2..4, negligible outside
  double mellin_extent = 40.0;     // |f^#(x)| negligible for |x| beyond this
};

class RadialCharge {
public:
  using Profile = std::function<double(double)>;

  /// Momentum-only charge; the position profile is obtained from the radial
  /// sine transform and tabulated on first use.
  RadialCharge(Profile momentum, DecayEnvelope envelope, std::string label);
  /// Charge with a closed-form position profile on the given log window.
  RadialCharge(Profile momentum, Profile position, quad::Window log_position,
               DecayEnvelope envelope, std::string label);

  double momentum(double p) const;
  double position(double y) const;
  bool has_closed_position() const;
  bool is_zero() const;

  const DecayEnvelope &envelope() const;
  quad::Window momentum_window() const { return envelope().log_momentum; }
  /// Log window outside which y^3 |xi(y)|^2 is negligible. For momentum-only
  /// charges this builds the position table.
  quad::Window position_window() const;
  const std::string &label() const;

  /// Composed scale factor relative to the unscaled family member (1 if none).
  double scale_factor() const;

private:
  struct Impl;
  friend RadialCharge scale_charge(const RadialCharge &f, int n);
  friend RadialCharge zero_charge();
  explicit RadialCharge(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> m_impl;
};

/// Charge xi = 0; every form evaluates to 0 on it.
RadialCharge zero_charge();

/// f(p) = exp(-(scale p)^2 / 2), xi(y) = scale^-3 exp(-y^2 / (2 scale^2)).
RadialCharge gaussian_charge(double scale);

/// Positive combination sum_i c_i exp(-(s_i p)^2 / 2) with closed-form
/// position profile.
RadialCharge gaussian_mixture(const std::vector<double> &coefficients,
                              const std::vector<double> &scales);

/// Trial family f_beta(p) = p^-2 exp(-(p^beta + p^-beta) / 2).
RadialCharge trial_fbeta(double beta);

/// eta_n: momentum p -> f(p/n)/n, position y -> n^2 xi(n y).
RadialCharge scale_charge(const RadialCharge &f, int n);

/// Parses "gaussian:<scale>" or "fbeta:<beta>".
RadialCharge parse_charge_spec(std::string_view spec);

/// xi(y) = sqrt(2/pi) / y int_0^inf p sin(p y) f(p) dp, computed from the
/// momentum profile regardless of any closed form.
double radial_fourier_to_position(const RadialCharge &f, double y,
                                  const quad::QuadratureSpec &spec);

/// int_0^inf p^k |f(p)|^2 dp.
double momentum_moment(const RadialCharge &f, int k,
                       const quad::QuadratureSpec &spec);

/// int_R^3 |xi|^2 = 4 pi int p^2 |f|^2 dp.
double l2_norm_sq(const RadialCharge &f, const quad::QuadratureSpec &spec);

/// [xi]^2_{1/2} = 2 pi^2 int |k| |f(k)|^2 d^3k = 8 pi^3 int p^3 |f|^2 dp.
double gagliardo_seminorm_sq(const RadialCharge &f,
                             const quad::QuadratureSpec &spec);

struct MellinProfile {
  std::vector<double> x;
  std::vector<std::complex<double>> value;
  double grid_step = 0.0;
  double extent = 0.0;

  /// Trapezoidal int |f^#(x)|^2 w(x) dx over the grid.
  double weighted_norm_sq(const std::function<double(double)> &w) const;
  double norm_sq() const;
};

/// f^#(x) = (2 pi)^-1/2 int dt exp(-i t x) exp(2t) f(exp t), sampled on the
/// uniform grid [-extent, extent].
MellinProfile mellin_transform(const RadialCharge &f, double extent,
                               double grid_step,
                               const quad::QuadratureSpec &spec);
/// Defaults: extent from the decay envelope, grid_step 0.05.
MellinProfile mellin_transform(const RadialCharge &f,
                               const quad::QuadratureSpec &spec);

/// sqrt(2/pi) K_{i x/beta}(1) / beta, the closed-form Mellin profile of f_beta.
double trial_mellin_closed_form(double beta, double x);

enum class ThetaKind { indicator, custom_sampled };

/// Cutoff profile theta of the three-body term: continuous at 0 with
/// theta(0) = 1, 1 - s/b <= theta(s) <= 1 + s/b, compact support.
class ThetaProfile {
public:
  /// theta = 1 on [0, b), 0 beyond.
  static ThetaProfile indicator(double b);
  /// Piecewise linear through (s_k, theta_k); theta = 0 past the last sample,
  /// whose value must be 0. Validated against the sandwich bound.
  static ThetaProfile custom(double b, std::vector<double> s,
                             std::vector<double> theta);

  double operator()(double s) const;
  ThetaKind kind() const { return m_kind; }
  double b() const { return m_b; }
  double support() const;
  /// Points where theta may be non-smooth (useful integration breakpoints).
  std::vector<double> breakpoints() const;
  const std::vector<double> &sample_s() const { return m_s; }
  const std::vector<double> &sample_theta() const { return m_theta; }

private:
  ThetaProfile() = default;
  ThetaKind m_kind = ThetaKind::indicator;
  double m_b = 1.0;
  std::vector<double> m_s;
  std::vector<double> m_theta;
};

} // namespace zr3b::charges
