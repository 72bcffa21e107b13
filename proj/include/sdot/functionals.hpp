#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sdot/cell_quadrature.hpp"
#include "sdot/geometry.hpp"

namespace sdot {

using FieldFn = std::function<Point(const Point&)>;

// Vector test field with a certified bound on sup|phi| + [phi]_alpha.
// alpha = 0 marks a merely bounded (possibly discontinuous) field, whose
// bound then covers sup|phi| + sup|phi(x) - phi(y)|.
struct TestField {
  FieldFn eval;
  double alpha = 1.0;
  double holder_bound = 1.0;
  std::string label;
  std::vector<double> params;  // centers, radii, coefficients: recorded in run metadata

  Point operator()(const Point& x) const { return eval(x); }
};

struct CertificateResult {
  double max_ratio = 0.0;  // largest sampled |phi(x) - phi(y)| / |x - y|^alpha
  double max_value = 0.0;  // largest sampled |phi(x)|
  bool passed = false;
};

// Two-point check on `pairs` random pairs from the domain, half of them at
// small separations so that local singularities are probed.
CertificateResult certify(const TestField& field, const Domain& domain, std::uint64_t seed,
                          std::size_t pairs = 10000);

TestField identity_field(const Domain& domain, bool normalized = false);
// (x - x0) |x - x0|^(alpha - 1); in 1D this is sign(x - x0)|x - x0|^alpha.
TestField power_field(const Domain& domain, double alpha, const Point& center, bool normalized = false);
// sign(x_1 - c) e_1
TestField sign_field(double cut = 0.0);

// Family normalized to holder_bound <= 1: coordinate fields and id first,
// then radial power fields at seeded centers, then random bump superpositions.
std::vector<TestField> make_test_family(double alpha, std::size_t count, std::uint64_t seed,
                                        const Domain& domain);

// <phi, T^eps - T_ref>_{L^2(P)} where T^eps is the entropic map of
// (sites, z, eps) and T_ref is the piecewise constant map of diag_ref. The
// rule is aligned with the cells of diag_ref and graded toward its facets.
Vector pair_maps(std::span<const TestField> family, std::span<const Point> sites, const Vector& z,
                 double eps, const LaguerreDiagram& diag_ref, const SourceMeasure& source,
                 const GradedOptions& quad = {});
double l2_sq_maps(std::span<const Point> sites, const Vector& z, double eps,
                  const LaguerreDiagram& diag_ref, const SourceMeasure& source, const GradedOptions& quad = {});

// <phi, T^eps - T^0> with T^eps built on the sites of diag0.
double pair_difference(const TestField& phi, const PotentialVector& z_eps, const LaguerreDiagram& diag0,
                       const SourceMeasure& source);
double l2_sq_distance(const PotentialVector& z_eps, const LaguerreDiagram& diag0, const SourceMeasure& source);
double dual_norm_lower_bound(const PotentialVector& z_eps, const LaguerreDiagram& diag0,
                             const SourceMeasure& source, std::span<const TestField> family);

}  // namespace sdot
