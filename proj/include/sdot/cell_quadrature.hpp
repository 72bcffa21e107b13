#pragma once

#include <vector>

#include "sdot/geometry.hpp"

namespace sdot {

struct CellNode {
  Point x;
  double weight;  // quadrature weight times rho(x)
  int cell;
};

// Cell-aligned quadrature whose panels are refined toward every facet so that
// the entropic boundary layers (decay length eps / (2 |y_i - y_j|)) are
// resolved. eps = 0 gives a plain cellwise rule.
struct GradedOptions {
  double eps = 0.0;
  int order_1d = 16;
  int order_2d = 8;
  int fine_levels_1d = 24;  // extra halvings toward 1D facets (endpoint singularities)
  int base_panels_1d = 4;
  int base_panels_2d = 2;
  double panel = 4.0;       // panel width in decay lengths
  double collar = 40.0;     // refined collar in decay lengths (and at least collar * eps)
};

// Decay length of the boundary layer between sites i and j.
double layer_length(const LaguerreDiagram& diag, int i, int j, double eps);

std::vector<CellNode> graded_cell_nodes(const LaguerreDiagram& diag, const SourceMeasure& source,
                                        const GradedOptions& opts);

}  // namespace sdot
