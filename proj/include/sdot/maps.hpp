#pragma once

#include <span>
#include <vector>

#include "sdot/geometry.hpp"

namespace sdot {

// <y_i - y_j, x> - z_i + z_j
double delta(const DiscreteMeasure& target, const PotentialVector& z, int i, int j, const Point& x);

// y_i for the cell containing x (lowest index on ties).
Point brenier_eval(const LaguerreDiagram& diag, const Point& x);
std::vector<Point> brenier_eval(const LaguerreDiagram& diag, std::span<const Point> xs);

// Softmax weights of the entropic map at x.
Vector entropic_weights(std::span<const Point> sites, const Vector& z, double eps, const Point& x);

Point entropic_eval(const DiscreteMeasure& target, const PotentialVector& z, const Point& x);
std::vector<Point> entropic_eval(const DiscreteMeasure& target, const PotentialVector& z,
                                 std::span<const Point> xs);

// T^eps(x) - y_ref, summed as sum_j w_j (y_j - y_ref) so the difference keeps
// full relative precision when T^eps(x) is close to y_ref.
Point entropic_offset(std::span<const Point> sites, const Vector& z, double eps, const Point& x,
                      const Point& y_ref);

}  // namespace sdot
