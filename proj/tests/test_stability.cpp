#include "zr3b/errors.hpp"
#include "zr3b/specfun.hpp"
#include "zr3b/stability.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>

using namespace zr3b;
using namespace zr3b::stability;
using std::numbers::pi;

namespace {

quad::QuadratureSpec spec;

forms::FormParams params(double gamma, double lambda) {
  forms::FormParams p;
  p.gamma = gamma;
  p.lambda = lambda;
  return p;
}

std::vector<int> range(int lo, int hi) {
  std::vector<int> v;
  for (int n = lo; n <= hi; ++n)
    v.push_back(n);
  return v;
}

SweepRecord synthetic(int n, double total) {
  SweepRecord r;
  r.n = n;
  r.breakdown.total = total;
  r.total_over_n2 = total / (double(n) * n);
  return r;
}

} // namespace

TEST(Thresholds, ClosedForms) {
  EXPECT_NEAR(gamma_critical(), 0.782004, 5e-7);
  EXPECT_NEAR(gamma_prime_critical(), 1.44867, 5e-6);
  EXPECT_NEAR(gamma_prime_critical() - gamma_critical(), 2.0 / 3.0, 1e-15);
  EXPECT_LT(gamma_critical(), gamma_prime_critical());
  const double g = gamma_prime_critical();
  EXPECT_NEAR(3 - pi * pi * (2 - g) * (2 - g), 0.0, 1e-12);
}

TEST(MinSymbol, SignStructure) {
  EXPECT_LE(std::abs(min_symbol(gamma_critical()).s_min), 1e-10);
  EXPECT_EQ(min_symbol(gamma_critical()).x_min, 0.0);
  for (double g : {0.8, 1.0, 1.5, 2.0, 3.0})
    EXPECT_GE(min_symbol(g).s_min, 0.0) << g;
  for (double g : {0.0, 0.3, 0.5, 0.6, 0.75})
    EXPECT_LT(min_symbol(g).s_min, 0.0) << g;
}

TEST(MinSymbol, AgreesWithDenseScan) {
  for (double g : {0.0, 1.2, 2.0}) {
    double best = INFINITY;
    for (int k = 0; k <= 200000; ++k)
      best = std::min(best, specfun::symbol_S(50.0 * k / 200000, {g}));
    EXPECT_LE(min_symbol(g).s_min, best + 1e-14);
    EXPECT_GE(min_symbol(g).s_min, best - 1e-9);
  }
}

TEST(MinSymbol, MonotoneInGamma) {
  EXPECT_LT(min_symbol(0.5).s_min, min_symbol(0.8).s_min);
  EXPECT_LT(min_symbol(0.8).s_min, min_symbol(1.1).s_min);
  EXPECT_THROW(min_symbol(1.0, 0.0), DomainError);
}

TEST(ThresholdFromSymbol, ReproducesClosedForm) {
  EXPECT_NEAR(threshold_from_symbol(1e-8), gamma_critical(), 1e-8);
  EXPECT_NEAR(threshold_from_symbol(1e-10, 20.0), threshold_from_symbol(1e-10, 50.0), 1e-9);
  EXPECT_THROW(threshold_from_symbol(0.0), DomainError);
}

TEST(TrialSymbolIntegral, FrozenValues) {
  // independent evaluation: tanh-sinh in nu of K_{i nu}(1)^2 S(beta nu),
  // K_{i nu}(1) itself from tanh-sinh in t
  boost::math::quadrature::tanh_sinh<double> ts;
  auto kin = [&](double nu) {
    return ts.integrate([nu](double t) { return std::exp(-std::cosh(t)) * std::cos(nu * t); },
                        0.0, 8.0);
  };
  auto oracle = [&](double beta, double g) {
    auto f = [&](double nu) {
      const double k = kin(nu);
      return k * k * specfun::symbol_S(beta * nu, {g});
    };
    return 192 * pi / beta * ts.integrate(f, 0.0, 16.0);
  };
  EXPECT_NEAR(oracle(0.3, 0.5), -127.4786657, 1e-6);
  EXPECT_NEAR(trial_symbol_integral(0.3, 0.5, spec), -127.4786657, 1e-6);
  EXPECT_NEAR(trial_symbol_integral(0.3, 2.0, spec), 686.3307482, 1e-6);
  EXPECT_NEAR(trial_symbol_integral_sampled(0.3, 0.5, spec), -127.4786657, 1e-6);
}

TEST(TrialSymbolIntegral, MatchesComponentForms) {
  // at lambda = 0 the symbol integral is diag + off + reg
  const auto f = charges::trial_fbeta(1.0);
  const double sum = forms::phi_diag(f, 0, spec).value + forms::phi_off(f, 0, spec).value +
                     forms::phi_reg(f, 0.4, spec).value;
  EXPECT_NEAR(trial_symbol_integral(1.0, 0.4, spec), sum, 1e-8 * std::abs(sum));
}

TEST(CollapseSweep, IdentityScaleMatchesDirect) {
  const auto r = collapse_sweep(0.3, params(0.5, 1.0), {1, 2}, spec);
  const auto direct = forms::phi_total(charges::trial_fbeta(0.3), params(0.5, 1.0), spec);
  ASSERT_TRUE(r[0].ok);
  EXPECT_DOUBLE_EQ(r[0].breakdown.total, direct.total);
  EXPECT_EQ(r[1].n, 2);
  EXPECT_DOUBLE_EQ(r[1].total_over_n2, r[1].breakdown.total / 4);
}

TEST(CollapseSweep, ThreadsKeepOrderAndValues) {
  const auto serial = collapse_sweep(0.5, params(0.5, 1.0), range(1, 8), spec);
  setenv("ZR3B_THREADS", "3", 1);
  EXPECT_EQ(sweep_threads(), 3);
  const auto par = collapse_sweep(0.5, params(0.5, 1.0), range(1, 8), spec);
  unsetenv("ZR3B_THREADS");
  ASSERT_EQ(par.size(), serial.size());
  for (std::size_t i = 0; i < par.size(); ++i) {
    EXPECT_EQ(par[i].n, serial[i].n);
    EXPECT_EQ(par[i].breakdown.total, serial[i].breakdown.total);
  }
}

TEST(CollapseSweep, RejectsBadInput) {
  EXPECT_THROW(collapse_sweep(0.3, params(0.5, 1.0), {}, spec), DomainError);
  EXPECT_THROW(collapse_sweep(0.3, params(0.5, 1.0), {2, 1}, spec), DomainError);
  EXPECT_THROW(collapse_sweep(0.0, params(0.5, 1.0), {1}, spec), DomainError);
}

TEST(CollapseSweep, FailedRecordsAreMarked) {
  quad::QuadratureSpec tight;
  tight.max_subdivisions = 1;
  tight.rel_tol = 1e-15;
  tight.abs_tol = 1e-300;
  const auto r = collapse_sweep(0.3, params(0.5, 1.0), {1, 2}, tight);
  EXPECT_FALSE(r[0].ok);
  EXPECT_FALSE(r[0].error.empty());
  EXPECT_EQ(r[1].n, 2);
}

TEST(CollapseSweep, SubThresholdGammaZeroDiverges) {
  const auto r = collapse_sweep(0.3, params(0.0, 1.0), range(1, 64), spec);
  EXPECT_LT(r.back().breakdown.total, -1e3);
  EXPECT_TRUE(collapse_verdict(r).decreasing);
  EXPECT_TRUE(collapse_verdict(r).collapse());
}

TEST(CollapseSweep, AboveThresholdGrows) {
  const auto r = collapse_sweep(0.3, params(2.0, 1.0), range(1, 32), spec);
  EXPECT_GT(fit_scaling(r).c2, 0.0);
  EXPECT_FALSE(collapse_verdict(r).collapse());
}

TEST(CollapseSweep, SubThresholdGammasTrendDown) {
  // near gamma_c only narrow Mellin profiles (small beta) see S < 0, and the
  // n^2 term takes over late; both are cheap here
  const std::vector<int> ns{1 << 12, 1 << 13, 1 << 14, 1 << 15, 1 << 16, 1 << 17};
  for (double g : {0.0, 0.3, 0.6, 0.75}) {
    EXPECT_LT(min_symbol(g).s_min, 0.0);
    const auto beta = find_negative_beta(g, {1, 0.5, 0.3, 0.2, 0.1, 0.05}, spec);
    ASSERT_TRUE(beta.has_value()) << g;
    const auto r = collapse_sweep(*beta, params(g, 1.0), ns, spec);
    EXPECT_TRUE(collapse_verdict(r).decreasing) << g;
    EXPECT_LT(r.back().breakdown.total, r.front().breakdown.total) << g;
    EXPECT_LT(fit_scaling(r).c2, 0.0) << g;
  }
}

TEST(FitScaling, ExactModel) {
  std::vector<SweepRecord> rs;
  for (int n = 1; n <= 10; ++n)
    rs.push_back(synthetic(n, 7.0 * n * n + 3.0 * n));
  const auto fit = fit_scaling(rs);
  EXPECT_NEAR(fit.c2, 7.0, 1e-12);
  EXPECT_NEAR(fit.c1, 3.0, 1e-10);
  EXPECT_NEAR(fit.residual, 0.0, 1e-9);
  EXPECT_EQ(fit.used, 10);
}

TEST(FitScaling, SkipsFailedAndNeedsFour) {
  std::vector<SweepRecord> rs;
  for (int n = 1; n <= 5; ++n)
    rs.push_back(synthetic(n, -2.0 * n * n));
  rs[2].ok = false;
  rs[2].breakdown.total = 1e9;
  EXPECT_NEAR(fit_scaling(rs).c2, -2.0, 1e-12);
  rs[3].ok = false;
  EXPECT_THROW(fit_scaling(rs), DomainError);
}

TEST(Verdict, Rules) {
  std::vector<SweepRecord> rs;
  for (int n = 1; n <= 8; ++n)
    rs.push_back(synthetic(n, n < 3 ? 10.0 : -500.0 * n));
  EXPECT_TRUE(collapse_verdict(rs).decreasing);
  EXPECT_TRUE(collapse_verdict(rs).deep); // -4000 < -1000
  rs[6].breakdown.total = rs[5].breakdown.total; // tie breaks strictness
  EXPECT_FALSE(collapse_verdict(rs).decreasing);
  EXPECT_FALSE(collapse_verdict(std::vector<SweepRecord>(rs.begin(), rs.begin() + 4)).decreasing);
}

TEST(FindNegativeBeta, GridExamples) {
  const auto b = find_negative_beta(0.7, {1, 0.5, 0.25, 0.1, 0.05}, spec);
  ASSERT_TRUE(b.has_value());
  EXPECT_EQ(*b, 0.25);
  EXPECT_LT(trial_symbol_integral(*b, 0.7, spec), 0.0);
  EXPECT_EQ(find_negative_beta(0.0, {1, 0.5}, spec).value(), 1.0);
}

TEST(FindNegativeBeta, NearThresholdIsTiny) {
  const double g = gamma_critical() - 1e-6;
  const auto b = find_negative_beta(g, {1e-1, 1e-2, 1e-3, 1e-4}, spec);
  ASSERT_TRUE(b.has_value());
  const double v = trial_symbol_integral(*b, g, spec);
  EXPECT_LT(v, 0.0);
  EXPECT_LT(std::abs(v), 1e-4 * std::abs(trial_symbol_integral(*b, 0.0, spec)));
}

TEST(FindNegativeBeta, NotFoundAndPrecondition) {
  EXPECT_FALSE(find_negative_beta(0.75, {2.0, 1.5}, spec).has_value());
  EXPECT_THROW(find_negative_beta(1.0, {0.1}, spec), DomainError);
}

TEST(PhiZero, LinearBound) {
  // |Phi_0[eta_n]| <= 12 pi sup|beta| ||eta_n||^2 = 12 pi sup|beta| n ||f||^2
  const auto p = params(0.5, 1.0);
  const auto f = charges::trial_fbeta(0.3);
  const double bound = 12 * pi * (p.gamma / p.theta.b()) * charges::l2_norm_sq(f, spec);
  for (int n : {1, 4, 16, 64, 256, 1024}) {
    const double z = forms::phi_zero(charges::scale_charge(f, n), p, spec).value;
    EXPECT_LE(std::abs(z) / n, bound) << n;
  }
}
