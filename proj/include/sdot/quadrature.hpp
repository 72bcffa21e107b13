#pragma once

#include <span>
#include <vector>

#include "sdot/types.hpp"

namespace sdot {

// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Cached; the returned reference stays valid for the lifetime of the program.
const GaussRule& gauss_legendre(int order);

struct WeightedPoint {
  Point x;
  double weight;
};

// Settings for the plain (ungraded) rules used by integrate() and the
// unregularized cell integrals.
struct QuadratureOptions {
  int order_1d = 32;       // Gauss-Legendre points per panel
  int panels_1d = 8;       // composite panels per interval (<= 256)
  int order_2d = 5;        // collapsed Gauss points per direction, exact to degree 8
  int refine_2d = 0;       // uniform 4-way triangle refinements
};

// Appends the nodes of the composite rule on [a, b] split at `breaks`
// (sorted, inside (a, b) or ignored) to `out`. Weights are the plain
// quadrature weights without any density.
void append_interval_nodes(double a, double b, std::span<const double> breaks,
                           const QuadratureOptions& opts,
                           std::vector<WeightedPoint>& out);

// Collapsed (conical product) Gauss rule on the triangle (a, b, c) with
// `order` points per direction.
void append_triangle_nodes(const Point& a, const Point& b, const Point& c, int order,
                           int refine, std::vector<WeightedPoint>& out);

// Fan triangulation of a convex polygon from its vertex centroid.
void append_polygon_nodes(std::span<const Point> polygon, const QuadratureOptions& opts,
                          std::vector<WeightedPoint>& out);

double polygon_area(std::span<const Point> polygon);
Point polygon_centroid(std::span<const Point> polygon);

// Breakpoints on [0, length] refined toward either end. A non-positive or
// infinite scale means that end carries no boundary layer. Near a layered
// end the panels have width `panel` * scale out to `collar`, then grow
// geometrically; `fine_levels` extra halvings resolve endpoint
// singularities of the integrand below the first panel.
struct GradingOptions {
  double panel = 4.0;
  double collar = 40.0;
  double growth = 2.0;
  int fine_levels = 0;
  int base_panels = 1;
};

std::vector<double> graded_breakpoints(double length, double left_scale, double right_scale,
                                       const GradingOptions& opts);

}  // namespace sdot
