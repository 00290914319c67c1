#include "zr3b/charges.hpp"

#include "zr3b/errors.hpp"
#include "zr3b/specfun.hpp"

#include <boost/math/interpolators/cardinal_quintic_b_spline.hpp>
#include <boost/math/quadrature/detail/ooura_fourier_integrals_detail.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace zr3b::charges {

using std::numbers::pi;

namespace {

const double sqrt_2_over_pi = std::sqrt(2.0 / pi);

// Position table: uniform grid in u = ln y.
constexpr double table_step = 1.0 / 32.0;
constexpr double table_below_window = 25.0; // start at u = -ln p_hi - this
constexpr double table_tail_ratio = 1e-36;  // y^3 xi^2 cut relative to peak
constexpr int table_tail_run = 64;          // consecutive tiny samples to stop
constexpr std::size_t table_max_points = 40000;
// y p_hi below this: direct quadrature in t = ln p; above: Ooura.
constexpr double direct_max_phase = 60.0;

// Ooura sine nodes are shared read-only; the level loop below is our own, so
// repeated calls are deterministic and nothing is mutated after setup.
const boost::math::quadrature::detail::ooura_fourier_sin_detail<double> &
ooura_tables() {
  static const boost::math::quadrature::detail::ooura_fourier_sin_detail<double>
      tables(1e-10, 10);
  return tables;
}

// int_0^inf g(p) sin(omega p) dp, omega > 0.
double ooura_sine(const std::function<double(double)> &g, double omega) {
  const auto &t = ooura_tables();
  const auto &bn = t.big_nodes();
  const auto &bw = t.weights_for_big_nodes();
  const auto &ln = t.little_nodes();
  const auto &lw = t.weights_for_little_nodes();
  const double inv = 1.0 / omega;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < bn.size(); ++i) {
    double sum = 0.0, mag = 0.0;
    for (std::size_t j = 0; j < bn[i].size(); ++j) {
      const double v = g(bn[i][j] * inv) * bw[i][j];
      sum += v;
      mag += std::abs(v);
    }
    for (std::size_t j = 0; j < ln[i].size(); ++j) {
      const double v = g(ln[i][j] * inv) * lw[i][j];
      sum += v;
      mag += std::abs(v);
    }
    if (!std::isnan(prev)) {
      const double diff = std::abs(sum - prev);
      if (diff <= 1e-11 * std::abs(sum) || diff <= 256 * eps * mag)
        return sum * inv;
    }
    prev = sum;
  }
  // Out of levels: the transform is below the cancellation floor here.
  return prev * inv;
}

quad::Window shifted(quad::Window w, double by) { return {w.lo + by, w.hi + by}; }

quad::Window gaussian_momentum_window(double s) {
  return {std::log(1.0 / s) - 30.0, std::log(std::sqrt(120.0) / s)};
}
quad::Window gaussian_position_window(double s) {
  return {std::log(s) - 30.0, std::log(std::sqrt(120.0) * s)};
}

void require_positive(double v, const char *what) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw DomainError(std::string(what) + " must be positive and finite");
}

struct PositionTable {
  double u0 = 0.0;
  double u1 = 0.0;
  double xi_small = 0.0; // value at the first grid point
  boost::math::interpolators::cardinal_quintic_b_spline<double> spline;
};

} // namespace

struct RadialCharge::Impl {
  Profile momentum;
  Profile position;                    // empty if only momentum is known
  quad::Window position_window{};      // valid if position is set
  DecayEnvelope envelope;
  std::string label;
  bool zero = false;

  // Scaled copy of another charge.
  std::optional<RadialCharge> base;
  double n = 1.0;

  mutable std::once_flag table_once;
  mutable std::unique_ptr<PositionTable> table;

  const PositionTable &position_table(const RadialCharge &self) const;
};

namespace {

double direct_transform(const RadialCharge &f, double y,
                        const quad::QuadratureSpec &spec) {
  // sqrt(2/pi) int p^3 sinc(p y) f(p) dt, p = e^t.
  const auto w = f.momentum_window();
  auto integrand = [&](double t) {
    const double p = std::exp(t);
    const double z = p * y;
    const double sinc = z < 1e-4 ? 1.0 - z * z / 6.0 : std::sin(z) / z;
    return p * p * p * sinc * f.momentum(p);
  };
  return sqrt_2_over_pi * quad::integrate_interval(integrand, w.lo, w.hi, spec).value;
}

double transform_at(const RadialCharge &f, double y,
                    const quad::QuadratureSpec &spec) {
  const double p_hi = std::exp(f.momentum_window().hi);
  if (y * p_hi <= direct_max_phase)
    return direct_transform(f, y, spec);
  auto g = [&](double p) { return p * f.momentum(p); };
  return sqrt_2_over_pi * ooura_sine(g, y) / y;
}

} // namespace

const PositionTable &
RadialCharge::Impl::position_table(const RadialCharge &self) const {
  std::call_once(table_once, [&] {
    quad::QuadratureSpec spec;
    spec.rel_tol = 1e-11;
    const double xi0 = direct_transform(self, 0.0, spec);
    spec.abs_tol = 1e-15 * std::max(std::abs(xi0), 1e-300);

    const double u0 = -envelope.log_momentum.hi - table_below_window;
    const double u_cap = -envelope.log_momentum.lo + 10.0;
    std::vector<double> vals;
    double peak = 0.0;
    int tiny_run = 0;
    for (std::size_t k = 0;; ++k) {
      const double u = u0 + static_cast<double>(k) * table_step;
      const double y = std::exp(u);
      const double v = transform_at(self, y, spec);
      vals.push_back(v);
      const double w = y * y * y * v * v;
      peak = std::max(peak, w);
      tiny_run = (w <= table_tail_ratio * peak) ? tiny_run + 1 : 0;
      if (tiny_run >= table_tail_run && k > 2 * table_tail_run)
        break;
      if (u > u_cap || vals.size() >= table_max_points)
        break;
    }
    const double u1 = u0 + static_cast<double>(vals.size() - 1) * table_step;
    table = std::make_unique<PositionTable>(PositionTable{
        u0, u1, vals.front(),
        boost::math::interpolators::cardinal_quintic_b_spline<double>(
            vals, u0, table_step, {0.0, 0.0}, {0.0, 0.0})});
  });
  return *table;
}

RadialCharge::RadialCharge(Profile momentum, DecayEnvelope envelope,
                           std::string label) {
  auto impl = std::make_shared<Impl>();
  impl->momentum = std::move(momentum);
  impl->envelope = envelope;
  impl->label = std::move(label);
  m_impl = std::move(impl);
}

RadialCharge::RadialCharge(Profile momentum, Profile position,
                           quad::Window log_position, DecayEnvelope envelope,
                           std::string label) {
  auto impl = std::make_shared<Impl>();
  impl->momentum = std::move(momentum);
  impl->position = std::move(position);
  impl->position_window = log_position;
  impl->envelope = envelope;
  impl->label = std::move(label);
  m_impl = std::move(impl);
}

RadialCharge::RadialCharge(std::shared_ptr<const Impl> impl)
    : m_impl(std::move(impl)) {}

double RadialCharge::momentum(double p) const {
  const Impl &m = *m_impl;
  if (m.base)
    return m.base->momentum(p / m.n) / m.n;
  return m.momentum(p);
}

double RadialCharge::position(double y) const {
  const Impl &m = *m_impl;
  if (m.base)
    return m.n * m.n * m.base->position(m.n * y);
  if (m.position)
    return m.position(y);
  const PositionTable &t = m.position_table(*this);
  const double u = std::log(y);
  if (u <= t.u0)
    return t.xi_small;
  if (u >= t.u1)
    return 0.0;
  return t.spline(u);
}

bool RadialCharge::has_closed_position() const {
  const Impl &m = *m_impl;
  if (m.base)
    return m.base->has_closed_position();
  return static_cast<bool>(m.position);
}

bool RadialCharge::is_zero() const {
  const Impl &m = *m_impl;
  return m.base ? m.base->is_zero() : m.zero;
}

const DecayEnvelope &RadialCharge::envelope() const { return m_impl->envelope; }

quad::Window RadialCharge::position_window() const {
  const Impl &m = *m_impl;
  if (m.base)
    return shifted(m.base->position_window(), -std::log(m.n));
  if (m.position)
    return m.position_window;
  const PositionTable &t = m.position_table(*this);
  return {t.u0, t.u1};
}

const std::string &RadialCharge::label() const { return m_impl->label; }

double RadialCharge::scale_factor() const {
  const Impl &m = *m_impl;
  return m.base ? m.n * m.base->scale_factor() : 1.0;
}

RadialCharge zero_charge() {
  auto impl = std::make_shared<RadialCharge::Impl>();
  impl->momentum = [](double) { return 0.0; };
  impl->position = [](double) { return 0.0; };
  impl->position_window = {-1.0, 1.0};
  impl->envelope.log_momentum = {-1.0, 1.0};
  impl->label = "zero";
  impl->zero = true;
  return RadialCharge(std::shared_ptr<const RadialCharge::Impl>(std::move(impl)));
}

RadialCharge gaussian_charge(double scale) {
  require_positive(scale, "gaussian scale");
  DecayEnvelope env;
  env.rate = DecayClass::gaussian;
  env.scale = scale;
  env.log_momentum = gaussian_momentum_window(scale);
  env.mellin_extent = 40.0;
  const double s2 = scale * scale;
  const double norm = 1.0 / (s2 * scale);
  std::ostringstream label;
  label << "gaussian:" << scale;
  return RadialCharge(
      [s2](double p) { return std::exp(-0.5 * s2 * p * p); },
      [s2, norm](double y) { return norm * std::exp(-0.5 * y * y / s2); },
      gaussian_position_window(scale), env, label.str());
}

RadialCharge gaussian_mixture(const std::vector<double> &coefficients,
                              const std::vector<double> &scales) {
  if (coefficients.empty() || coefficients.size() != scales.size())
    throw DomainError("gaussian mixture needs matching non-empty lists");
  DecayEnvelope env;
  env.rate = DecayClass::mixture;
  env.mellin_extent = 40.0;
  quad::Window mw{std::numeric_limits<double>::infinity(),
                  -std::numeric_limits<double>::infinity()};
  quad::Window pw = mw;
  std::ostringstream label;
  label << "mixture";
  for (std::size_t i = 0; i < scales.size(); ++i) {
    require_positive(coefficients[i], "mixture coefficient");
    require_positive(scales[i], "mixture scale");
    const auto a = gaussian_momentum_window(scales[i]);
    const auto b = gaussian_position_window(scales[i]);
    mw = {std::min(mw.lo, a.lo), std::max(mw.hi, a.hi)};
    pw = {std::min(pw.lo, b.lo), std::max(pw.hi, b.hi)};
    label << (i ? "+" : ":") << coefficients[i] << "*g" << scales[i];
  }
  env.scale = *std::min_element(scales.begin(), scales.end());
  env.log_momentum = mw;
  auto momentum = [c = coefficients, s = scales](double p) {
    double sum = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i)
      sum += c[i] * std::exp(-0.5 * s[i] * s[i] * p * p);
    return sum;
  };
  auto position = [c = coefficients, s = scales](double y) {
    double sum = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i)
      sum += c[i] / (s[i] * s[i] * s[i]) * std::exp(-0.5 * y * y / (s[i] * s[i]));
    return sum;
  };
  return RadialCharge(momentum, position, pw, env, label.str());
}

RadialCharge trial_fbeta(double beta) {
  require_positive(beta, "beta");
  // e^{2t} f(e^t) = exp(-cosh(beta t)); the window half-width T keeps
  // cosh(beta T) - T above 50, enough for every weight p^k, k <= 4.
  double T = 1.0;
  while (std::cosh(beta * T) - T < 50.0)
    T *= 1.05;
  DecayEnvelope env;
  env.rate = DecayClass::stretched_exponential;
  env.scale = beta;
  env.log_momentum = {-T, T};
  env.mellin_extent = 40.0 * beta;
  std::ostringstream label;
  label << "fbeta:" << beta;
  return RadialCharge(
      [beta](double p) {
        if (!(p > 0.0))
          return 0.0;
        const double t = std::log(p);
        return std::exp(-2.0 * t - std::cosh(beta * t));
      },
      env, label.str());
}

RadialCharge scale_charge(const RadialCharge &f, int n) {
  if (n < 1)
    throw DomainError("scale factor must be a positive integer");
  const RadialCharge *root = &f;
  double factor = n;
  // Flatten nested scalings so scaled copies share one position table.
  if (f.m_impl->base) {
    factor *= f.m_impl->n;
    root = &*f.m_impl->base;
  }
  auto impl = std::make_shared<RadialCharge::Impl>();
  impl->base = *root;
  impl->n = factor;
  impl->envelope = root->envelope();
  impl->envelope.log_momentum = shifted(impl->envelope.log_momentum, std::log(factor));
  impl->zero = root->is_zero();
  std::ostringstream label;
  label << root->label() << "@" << factor;
  impl->label = label.str();
  return RadialCharge(std::shared_ptr<const RadialCharge::Impl>(std::move(impl)));
}

RadialCharge parse_charge_spec(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos)
    throw DomainError("charge must look like gaussian:<scale> or fbeta:<beta>");
  const auto kind = spec.substr(0, colon);
  const auto arg = spec.substr(colon + 1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), value);
  if (ec != std::errc() || ptr != arg.data() + arg.size())
    throw DomainError("bad numeric parameter in charge '" + std::string(spec) + "'");
  if (kind == "gaussian")
    return gaussian_charge(value);
  if (kind == "fbeta")
    return trial_fbeta(value);
  throw DomainError("unknown charge family '" + std::string(kind) + "'");
}

double radial_fourier_to_position(const RadialCharge &f, double y,
                                  const quad::QuadratureSpec &spec) {
  spec.validate();
  if (!(y >= 0.0) || !std::isfinite(y))
    throw DomainError("position radius must be finite and non-negative");
  return transform_at(f, y, spec);
}

double momentum_moment(const RadialCharge &f, int k,
                       const quad::QuadratureSpec &spec) {
  auto integrand = [&](double t) {
    const double p = std::exp(t);
    const double v = f.momentum(p);
    return std::pow(p, k + 1) * v * v;
  };
  const auto w = f.momentum_window();
  return quad::integrate_interval(integrand, w.lo, w.hi, spec).value;
}

double l2_norm_sq(const RadialCharge &f, const quad::QuadratureSpec &spec) {
  return 4.0 * pi * momentum_moment(f, 2, spec);
}

double gagliardo_seminorm_sq(const RadialCharge &f,
                             const quad::QuadratureSpec &spec) {
  return 8.0 * pi * pi * pi * momentum_moment(f, 3, spec);
}

double MellinProfile::weighted_norm_sq(const std::function<double(double)> &w) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double end = (i == 0 || i + 1 == x.size()) ? 0.5 : 1.0;
    sum += end * std::norm(value[i]) * w(x[i]);
  }
  return sum * grid_step;
}

double MellinProfile::norm_sq() const {
  return weighted_norm_sq([](double) { return 1.0; });
}

MellinProfile mellin_transform(const RadialCharge &f, double extent,
                               double grid_step,
                               const quad::QuadratureSpec &spec) {
  spec.validate();
  require_positive(extent, "Mellin extent");
  require_positive(grid_step, "Mellin grid step");
  const auto win = f.momentum_window();
  const int half = static_cast<int>(std::ceil(extent / grid_step));
  auto G = [&](double t) { return std::exp(2.0 * t) * f.momentum(std::exp(t)); };

  // Absolute floor tied to the size of G so that the far tails, which are
  // many orders below the peak, do not drive the adaptive refinement.
  double gmax = 0.0;
  for (int i = 0; i <= 400; ++i)
    gmax = std::max(gmax, std::abs(G(win.lo + win.width() * i / 400.0)));
  quad::QuadratureSpec s = spec;
  s.abs_tol = std::min(spec.abs_tol, 1e-14 * gmax * win.width());

  const double norm = 1.0 / std::sqrt(2.0 * pi);
  std::vector<std::complex<double>> positive(half + 1);
  for (int k = 0; k <= half; ++k) {
    const double x = k * grid_step;
    const double re = quad::integrate_interval(
        [&](double t) { return std::cos(t * x) * G(t); }, win.lo, win.hi, s).value;
    const double im = x == 0.0 ? 0.0 : -quad::integrate_interval(
        [&](double t) { return std::sin(t * x) * G(t); }, win.lo, win.hi, s).value;
    positive[k] = norm * std::complex<double>(re, im);
  }
  MellinProfile out;
  out.grid_step = grid_step;
  out.extent = half * grid_step;
  for (int k = -half; k <= half; ++k) {
    out.x.push_back(k * grid_step);
    out.value.push_back(k < 0 ? std::conj(positive[-k]) : positive[k]);
  }
  return out;
}

MellinProfile mellin_transform(const RadialCharge &f,
                               const quad::QuadratureSpec &spec) {
  return mellin_transform(f, f.envelope().mellin_extent, 0.05, spec);
}

double trial_mellin_closed_form(double beta, double x) {
  require_positive(beta, "beta");
  return sqrt_2_over_pi / beta * specfun::macdonald_imag_order(x / beta);
}

ThetaProfile ThetaProfile::indicator(double b) {
  require_positive(b, "theta cutoff b");
  ThetaProfile t;
  t.m_kind = ThetaKind::indicator;
  t.m_b = b;
  return t;
}

ThetaProfile ThetaProfile::custom(double b, std::vector<double> s,
                                  std::vector<double> theta) {
  require_positive(b, "theta cutoff b");
  if (s.size() < 2 || s.size() != theta.size())
    throw DomainError("theta samples need at least two matching points");
  if (s.front() != 0.0 || theta.front() != 1.0)
    throw DomainError("theta must start at (0, 1)");
  if (theta.back() != 0.0)
    throw DomainError("theta must vanish at its last sample");
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i > 0 && !(s[i] > s[i - 1]))
      throw DomainError("theta sample points must increase");
    const double slack = 1e-12 * (1.0 + s[i] / b);
    if (theta[i] < 1.0 - s[i] / b - slack || theta[i] > 1.0 + s[i] / b + slack)
      throw DomainError("theta violates 1 - s/b <= theta <= 1 + s/b");
  }
  ThetaProfile t;
  t.m_kind = ThetaKind::custom_sampled;
  t.m_b = b;
  t.m_s = std::move(s);
  t.m_theta = std::move(theta);
  return t;
}

double ThetaProfile::operator()(double s) const {
  if (m_kind == ThetaKind::indicator)
    return s < m_b ? 1.0 : 0.0;
  if (s >= m_s.back())
    return 0.0;
  const auto it = std::upper_bound(m_s.begin(), m_s.end(), s);
  const std::size_t i = static_cast<std::size_t>(it - m_s.begin()) - 1;
  const double w = (s - m_s[i]) / (m_s[i + 1] - m_s[i]);
  return (1.0 - w) * m_theta[i] + w * m_theta[i + 1];
}

double ThetaProfile::support() const {
  return m_kind == ThetaKind::indicator ? m_b : m_s.back();
}

std::vector<double> ThetaProfile::breakpoints() const {
  if (m_kind == ThetaKind::indicator)
    return {m_b};
  return {m_s.begin() + 1, m_s.end()};
}

} // namespace zr3b::charges
