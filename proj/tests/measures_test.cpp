#include <cmath>
#include <limits>
#include <numbers>

#include <gtest/gtest.h>

#include "sdot/measures.hpp"
#include "sdot/quadrature.hpp"
#include "support.hpp"

namespace sdot {
namespace {

using testing::shipped;
using testing::shipped_names;
using testing::two_atoms;
using testing::uniform_interval;
using testing::unit_square;

TEST(GaussLegendre, IntegratesMonomialsExactly) {
  for (int order : {2, 5, 8, 16, 32}) {
    const GaussRule& rule = gauss_legendre(order);
    for (int p = 0; p < 2 * order; ++p) {
      double sum = 0.0;
      for (std::size_t k = 0; k < rule.nodes.size(); ++k) sum += rule.weights[k] * std::pow(rule.nodes[k], p);
      const double exact = p % 2 ? 0.0 : 2.0 / (p + 1);
      EXPECT_NEAR(sum, exact, 1e-14) << "order " << order << " degree " << p;
    }
  }
}

TEST(TriangleRule, ExactForDegreeEight) {
  // Reference triangle (0,0),(1,0),(0,1): integral of x^a y^b = a! b! / (a + b + 2)!
  std::vector<WeightedPoint> nodes;
  append_triangle_nodes({0, 0}, {1, 0}, {0, 1}, 5, 0, nodes);
  for (int a = 0; a <= 8; ++a)
    for (int b = 0; a + b <= 8; ++b) {
      double sum = 0.0;
      for (const auto& n : nodes) sum += n.weight * std::pow(n.x.x(), a) * std::pow(n.x.y(), b);
      const double exact = std::tgamma(a + 1) * std::tgamma(b + 1) / std::tgamma(a + b + 3);
      EXPECT_NEAR(sum, exact, 1e-15);
    }
}

TEST(GradedBreakpoints, CoverIntervalAndRefineTowardLayers) {
  GradingOptions g;
  g.fine_levels = 6;
  const auto cuts = graded_breakpoints(2.0, 1e-3, 0.0, g);
  ASSERT_GE(cuts.size(), 3u);
  EXPECT_DOUBLE_EQ(cuts.front(), 0.0);
  EXPECT_DOUBLE_EQ(cuts.back(), 2.0);
  for (std::size_t k = 1; k < cuts.size(); ++k) EXPECT_LT(cuts[k - 1], cuts[k]);
  EXPECT_LE(cuts[1], 4e-3);
}

TEST(Integrate, Examples) {
  const SourceMeasure p = uniform_interval();
  EXPECT_NEAR(integrate(p, [](const Point&) { return 1.0; }), 1.0, 1e-14);
  EXPECT_NEAR(integrate(p, [](const Point& x) { return x.x() * x.x(); }), 1.0 / 3.0, 1e-14);
  const SourceMeasure sq = unit_square();
  EXPECT_NEAR(integrate(sq, [](const Point& x) { return x.x(); }), 0.5, 1e-14);
}

TEST(Integrate, LinearOnPolynomials) {
  const SourceMeasure sq = unit_square();
  const auto f = [](const Point& x) { return x.x() * x.x() * x.y() + 3.0 * x.y(); };
  const auto g = [](const Point& x) { return std::pow(x.x(), 4) - x.x() * x.y(); };
  const double a = 1.7, b = -0.3;
  const double lhs = integrate(sq, [&](const Point& x) { return a * f(x) + b * g(x); });
  EXPECT_NEAR(lhs, a * integrate(sq, f) + b * integrate(sq, g), 1e-12);
}

TEST(Integrate, RefinementChangesPolynomialIntegralsNegligibly) {
  QuadratureOptions coarse, fine;
  fine.order_1d = 64;
  fine.order_2d = 10;
  const SourceMeasure a(Domain::polygon({{0, 0}, {2, 0}, {1, 1.5}}), Density::uniform(), {1 / 1.5, 1 / 1.5, {}}, coarse);
  const SourceMeasure b(Domain::polygon({{0, 0}, {2, 0}, {1, 1.5}}), Density::uniform(), {1 / 1.5, 1 / 1.5, {}}, fine);
  const auto f = [](const Point& x) { return std::pow(x.x(), 3) * x.y() + x.y() * x.y(); };
  EXPECT_NEAR(integrate(a, f), integrate(b, f), 1e-10);
}

TEST(Integrate, NonFiniteValueNamesTheNode) {
  const SourceMeasure p = uniform_interval();
  try {
    integrate(p, [](const Point& x) { return x.x() > 0.5 ? std::numeric_limits<double>::quiet_NaN() : 1.0; });
    FAIL() << "expected EvaluationError";
  } catch (const EvaluationError& e) {
    EXPECT_NE(std::string(e.what()).find("node"), std::string::npos);
  }
}

TEST(SourceMeasure, ShippedConfigsHaveUnitMass) {
  for (const auto& name : shipped_names()) {
    const ProblemConfig p = shipped(name);
    EXPECT_NEAR(integrate(p.source, [](const Point&) { return 1.0; }), 1.0, 1e-12) << name;
  }
}

TEST(SourceMeasure, DensitiesNormalizeAndRespectBounds) {
  const Domain sq = Domain::polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  Density g = Density::truncated_gaussian({0.3, 0.6}, 0.5);
  g.bind(sq, {});
  double lo = 1e300, hi = 0;
  for (int a = 0; a <= 20; ++a)
    for (int b = 0; b <= 20; ++b) {
      lo = std::min(lo, g({a / 20.0, b / 20.0}));
      hi = std::max(hi, g({a / 20.0, b / 20.0}));
    }
  const SourceMeasure p(sq, Density::truncated_gaussian({0.3, 0.6}, 0.5), {lo * 0.999, hi * 1.001, {}});
  EXPECT_NEAR(integrate(p, [](const Point&) { return 1.0; }), 1.0, 1e-12);

  const SourceMeasure pl(Domain::interval(0, 1), Density::piecewise_linear({0, 0.5, 1}, {1, 2, 1}), {0.66, 1.34, {}});
  EXPECT_NEAR(integrate(pl, [](const Point&) { return 1.0; }), 1.0, 1e-14);
  EXPECT_NEAR(pl.density_at({0.5, 0}), 4.0 / 3.0, 1e-14);
}

TEST(SourceMeasure, RejectsInvalidInputs) {
  EXPECT_THROW(Domain::interval(1, 1), ValidationError);
  EXPECT_THROW(Domain::polygon({{0, 0}, {1, 0}, {2, 0}}), ValidationError);
  EXPECT_THROW(Domain::polygon({{0, 0}, {1, 0}, {0, 1}, {1, 1}}), ValidationError);
  // Bounds that do not bracket the density.
  EXPECT_THROW(SourceMeasure(Domain::interval(-1, 1), Density::uniform(), {0.6, 0.7, {}}), ValidationError);
  try {
    SourceMeasure(Domain::interval(-1, 1), Density::uniform(), {-1.0, 0.1, {}});
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_GE(e.violations().size(), 2u);
  }
}

TEST(Sample, Examples) {
  const SourceMeasure p = uniform_interval();
  const auto five = sample(p, 5, 7);
  ASSERT_EQ(five.size(), 5u);
  for (const Point& x : five) EXPECT_TRUE(x.x() >= -1 && x.x() <= 1);
  EXPECT_EQ(sample(p, 5, 7), five);

  double mean = 0;
  for (const Point& x : sample(p, 100000, 1)) mean += x.x();
  EXPECT_NEAR(mean / 1e5, 0.0, 0.02);

  int left = 0;
  for (const Point& x : sample(unit_square(), 100000, 1)) left += x.x() < 0.5;
  EXPECT_NEAR(left / 1e5, 0.5, 0.01);
}

TEST(DiscreteMeasure, ValidatesAndComputesSeparation) {
  EXPECT_THROW(DiscreteMeasure(1, {Point(-1, 0), Point(1, 0)}, (Vector(2) << 1, 0).finished(), 0.1), ValidationError);
  EXPECT_THROW(DiscreteMeasure(1, {Point(0, 0), Point(0, 0)}, Vector::Constant(2, 0.5), 0.1), ValidationError);
  EXPECT_THROW(DiscreteMeasure(1, {Point(-1, 0), Point(1, 0)}, (Vector(2) << 0.1, 0.9).finished(), 0.2),
               ValidationError);
  EXPECT_THROW(DiscreteMeasure(3, {Point(0, 0)}, Vector::Ones(1), 1.0), ValidationError);
  const DiscreteMeasure q(2, {Point(0, 0), Point(3, 4), Point(0, 1)}, (Vector(3) << 2, 1, 1).finished(), 0.25);
  EXPECT_NEAR(q.weights().sum(), 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(q.min_pair_distance(), 1.0);
}

TEST(SampleDiscrete, Examples) {
  const DiscreteMeasure half = two_atoms(0.5);
  const DiscreteMeasure e = sample_discrete(half, 4, 11);
  const double k = e.weight(0) * 4;
  EXPECT_DOUBLE_EQ(k, std::round(k));
  EXPECT_DOUBLE_EQ(e.weights().sum(), 1.0);

  const DiscreteMeasure big = sample_discrete(two_atoms(1.0 / 3.0), 100000, 3);
  EXPECT_LT(std::abs(big.weight(0) - 1.0 / 3.0), 0.01);
  EXPECT_DOUBLE_EQ(big.weights().sum(), 1.0);

  // Tiny samples keep zero-count atoms with weight 0.
  const DiscreteMeasure tiny = sample_discrete(two_atoms(0.5), 1, 5);
  EXPECT_TRUE(tiny.has_zero_atoms());
  std::vector<std::size_t> kept;
  EXPECT_EQ(tiny.without_zero_atoms(kept).size(), 1u);
}

}  // namespace
}  // namespace sdot
