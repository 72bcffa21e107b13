#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "sdot/experiments.hpp"
#include "support.hpp"

namespace sdot {
namespace {

using testing::shipped;
using testing::split_sites;
using testing::two_atoms;
using testing::uniform_interval;
using testing::unit_square;

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

TEST(GeometricGrid, EndpointsAndRatio) {
  const auto g = geometric_grid(1e-1, 1e-4, 16);
  ASSERT_EQ(g.size(), 16u);
  EXPECT_DOUBLE_EQ(g.front(), 1e-1);
  EXPECT_DOUBLE_EQ(g.back(), 1e-4);
  for (std::size_t k = 2; k < g.size(); ++k) EXPECT_NEAR(g[k] / g[k - 1], g[1] / g[0], 1e-12);
  EXPECT_THROW(geometric_grid(1e-4, 1e-1, 5), ArgumentError);
}

TEST(FitRate, ExactPowerLaw) {
  const auto g = geometric_grid(0.1, 1e-3, 8);
  std::vector<double> v, floor(8, 1e-30);
  for (double e : g) v.push_back(-3.0 * std::pow(e, 1.7));
  const RateFit f = fit_rate(g, v, floor, std::vector<bool>(8, true));
  EXPECT_NEAR(f.slope, 1.7, 1e-12);
  EXPECT_NEAR(f.intercept, std::log(3.0), 1e-11);
  EXPECT_DOUBLE_EQ(f.r_squared, 1.0);
  EXPECT_EQ(f.window.size(), 6u);
  EXPECT_EQ(f.window.front(), 2u);
  EXPECT_FALSE(f.slope_lower_bound);
}

TEST(FitRate, WindowRulesAndPolylog) {
  const auto g = geometric_grid(0.1, 1e-3, 10);
  std::vector<double> v, floor(10, 0.0);
  for (double e : g) v.push_back(e * e * std::log(1.0 / e));
  std::vector<bool> valid(10, true);
  valid[5] = false;
  floor[9] = v[9];  // below ten times its floor
  FitRules rules;
  rules.polylog = true;
  const RateFit f = fit_rate(g, v, floor, valid, rules);
  EXPECT_EQ(f.window, (std::vector<std::size_t>{2, 3, 4, 6, 7, 8}));
  EXPECT_NEAR(f.slope, 2.0, 1e-10);
  ASSERT_TRUE(f.polylog_coef);
  EXPECT_NEAR(*f.polylog_coef, 1.0, 1e-9);
  EXPECT_GE(f.r_squared, 0.0);
  EXPECT_LE(f.r_squared, 1.0);
}

TEST(FitRate, SecantBoundWhenUnresolved) {
  const std::vector<double> g{0.5, 0.4, 0.1, 0.01, 0.001, 0.0001};
  const std::vector<double> v{1, 1, 1e-2, 1e-16, 1e-16, 1e-16};
  const std::vector<double> floor(6, 1e-15);
  FitRules rules;
  const RateFit f = fit_rate(g, v, floor, std::vector<bool>(6, true), rules);
  EXPECT_TRUE(std::isnan(f.slope));
  ASSERT_TRUE(f.slope_lower_bound);
  EXPECT_NEAR(*f.slope_lower_bound, std::log((1e-2 - 1e-15) / (1e-16 + 1e-15)) / std::log(10.0), 1e-12);
}

TEST(Oracle, AgreesWithGaussKronrod) {
  for (double alpha : {0.0, 0.25, 0.5, 1.0})
    for (double eps : {0.3, 0.01, 1e-4}) {
      const auto f = [&](double x) { return std::pow(x, alpha) * (std::tanh(2 * x / eps) - 1); };
      using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
      const double cut = std::min(1.0, 40 * eps);
      const double ref = GK::integrate(f, 0.0, std::min(cut, eps), 15, 1e-14) +
                         (cut > eps ? GK::integrate(f, eps, cut, 15, 1e-14) : 0.0);
      EXPECT_NEAR(oracle_tanh(eps, OracleKind::kPower, alpha) / ref, 1.0, 1e-10) << alpha << " " << eps;
    }
}

TEST(Oracle, MatchesPairDifference) {
  const SourceMeasure p = uniform_interval();
  const auto diag = build_diagram(p, two_atoms(), Vector::Zero(2));
  const PotentialVector z(Vector::Zero(2), 0.01);
  const double pd = pair_difference(identity_field(p.domain()), z, diag, p);
  EXPECT_NEAR(pd / oracle_tanh(0.01, OracleKind::kPower, 1.0), 1.0, 1e-8);
  const double l2 = l2_sq_distance(z, diag, p);
  EXPECT_NEAR(l2 / oracle_tanh(0.01, OracleKind::kL2), 1.0, 1e-8);
}

TEST(Oracle, Limits) {
  EXPECT_NEAR(oracle_tanh_limit(OracleKind::kPower, 1.0), -kPi2 / 96, 1e-8);
  EXPECT_NEAR(oracle_tanh_limit_closed(OracleKind::kPower, 1.0), -kPi2 / 96, 1e-15);
  EXPECT_NEAR(oracle_tanh_limit_closed(OracleKind::kPower, 0.0), -std::log(2.0) / 2, 1e-15);
  EXPECT_NEAR(oracle_tanh_limit_closed(OracleKind::kL2), std::log(2.0) - 0.5, 1e-15);
  for (double alpha : {0.0, 0.25, 0.5, 1.0})
    EXPECT_NEAR(oracle_tanh_limit(OracleKind::kPower, alpha), oracle_tanh_limit_closed(OracleKind::kPower, alpha), 1e-8);
  EXPECT_NEAR(oracle_tanh_limit(OracleKind::kL2), std::log(2.0) - 0.5, 1e-8);
  // Scaled oracle approaches its limit.
  double prev = 1e300;
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    const double gap = std::abs(oracle_tanh(eps, OracleKind::kPower, 0.5) / std::pow(eps, 1.5) -
                                oracle_tanh_limit(OracleKind::kPower, 0.5));
    EXPECT_LE(gap, prev);
    prev = gap;
  }
  EXPECT_LT(prev, 1e-10);
}

TEST(ConstantCheck, Examples) {
  const ConstantCheck sym = constant_check(uniform_interval(), two_atoms(), 1e-3);
  EXPECT_NEAR(sym.predicted, -kPi2 / 96, 1e-14);
  EXPECT_LT(std::abs(sym.measured / sym.predicted - 1.0), 0.02);

  const ConstantCheck split = constant_check(unit_square(), split_sites(), 1e-3);
  EXPECT_NEAR(split.predicted, -kPi2 / 12, 1e-12);
  EXPECT_LT(split.relative_gap, 0.05);

  const DiscreteMeasure one(1, {Point(0.2, 0)}, Vector::Ones(1), 1.0);
  const ConstantCheck single = constant_check(uniform_interval(), one, 1e-3);
  EXPECT_EQ(single.predicted, 0.0);
  EXPECT_EQ(single.measured, 0.0);
  EXPECT_THROW(constant_check(uniform_interval(), two_atoms(), 0.1), ArgumentError);
}

TEST(ConstantCheck, GapShrinksWithEps) {
  const ProblemConfig cfg = shipped("2d-random-8-sites");
  const ConstantCheck a = constant_check(cfg.source, cfg.target, 1e-2);
  const ConstantCheck b = constant_check(cfg.source, cfg.target, 1e-3);
  EXPECT_LT(b.relative_gap, a.relative_gap);
}

SweepOptions pairing(const TestField& f) {
  SweepOptions o;
  o.fields = {f};
  return o;
}

TEST(RateSweep, Examples) {
  const SourceMeasure p = uniform_interval();
  const auto grid = geometric_grid(1e-1, 1e-4, 16);
  const SweepResult root = rate_sweep(p, two_atoms(), grid, pairing(power_field(p.domain(), 0.5, Point(0, 0))));
  EXPECT_NEAR(root.fit.slope, 1.5, 0.1);
  EXPECT_GE(root.fit.r_squared, 0.99);
  ASSERT_EQ(root.points.size(), 16u);
  for (const SweepPoint& pt : root.points) {
    EXPECT_TRUE(pt.valid);
    EXPECT_NEAR(pt.value / oracle_tanh(pt.eps, OracleKind::kPower, 0.5), 1.0, 1e-6);
  }

  const SweepResult id = rate_sweep(p, two_atoms(), grid, pairing(identity_field(p.domain())));
  EXPECT_NEAR(id.fit.slope, 2.0, 0.1);
  EXPECT_GE(id.fit.r_squared, 0.99);

  SweepOptions l2;
  l2.kind = FunctionalKind::kL2;
  const SweepResult l = rate_sweep(p, two_atoms(), grid, l2);
  EXPECT_NEAR(l.fit.slope, 1.0, 0.1);
  EXPECT_GE(l.fit.r_squared, 0.99);
}

TEST(RateSweep, Deterministic) {
  const ProblemConfig cfg = shipped("2d-square-4-sites");
  const auto grid = geometric_grid(1e-1, 1e-2, 6);
  const SweepOptions o = pairing(identity_field(cfg.source.domain(), true));
  const SweepResult a = rate_sweep(cfg.source, cfg.target, grid, o);
  const SweepResult b = rate_sweep(cfg.source, cfg.target, grid, o);
  for (std::size_t k = 0; k < a.points.size(); ++k) EXPECT_EQ(a.points[k].value, b.points[k].value);
  EXPECT_EQ(a.fit.slope, b.fit.slope);
}

TEST(RateSweep, RejectsBadGrids) {
  const SourceMeasure p = uniform_interval();
  const SweepOptions o = pairing(identity_field(p.domain()));
  EXPECT_THROW(rate_sweep(p, two_atoms(), geometric_grid(1e-1, 1e-3, 5), o), ArgumentError);
  EXPECT_THROW(rate_sweep(p, two_atoms(), {2.0, 0.5, 0.2, 0.1, 0.05, 0.01}, o), ArgumentError);
  EXPECT_THROW(rate_sweep(p, two_atoms(), {0.1, 0.2, 0.05, 0.04, 0.03, 0.01}, o), ArgumentError);
  EXPECT_THROW(parse_functional_kind("energy"), ValidationError);
  EXPECT_EQ(parse_functional_kind(functional_name(FunctionalKind::kDualNorm)), FunctionalKind::kDualNorm);
}

TEST(CltSim, SingleAtomIsDegenerate) {
  const DiscreteMeasure one(1, {Point(0.2, 0)}, Vector::Ones(1), 1.0);
  CltOptions o;
  o.n_list = {50, 200};
  o.trials = 20;
  const CltResult r = clt_sim(uniform_interval(), one, identity_field(uniform_interval().domain()), o);
  ASSERT_EQ(r.per_n.size(), 2u);
  for (const CltStats& s : r.per_n) {
    for (double v : s.statistic) EXPECT_EQ(v, 0.0);
    EXPECT_EQ(s.variance, 0.0);
  }
}

TEST(CltSim, ThreadCountDoesNotChangeResults) {
  const ProblemConfig cfg = shipped("asymmetric-1d");
  CltOptions o;
  o.n_list = {100, 400};
  o.trials = 24;
  o.seed = 5;
  o.threads = 1;
  const CltResult a = clt_sim(cfg.source, cfg.target, identity_field(cfg.source.domain()), o);
  o.threads = 3;
  const CltResult b = clt_sim(cfg.source, cfg.target, identity_field(cfg.source.domain()), o);
  for (std::size_t k = 0; k < a.per_n.size(); ++k) {
    EXPECT_EQ(a.per_n[k].statistic, b.per_n[k].statistic);
    EXPECT_EQ(a.per_n[k].gap, b.per_n[k].gap);
    EXPECT_NEAR(a.per_n[k].eps, std::pow(static_cast<double>(a.per_n[k].n), -0.3), 1e-15);
  }
  EXPECT_TRUE(a.warnings.empty());
  o.eps_exponent = 0.2;
  o.trials = 2;
  o.n_list = {50};
  EXPECT_FALSE(clt_sim(cfg.source, cfg.target, identity_field(cfg.source.domain()), o).warnings.empty());
}

}  // namespace
}  // namespace sdot
