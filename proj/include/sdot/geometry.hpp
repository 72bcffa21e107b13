#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sdot/measures.hpp"
#include "sdot/types.hpp"

namespace sdot {

// Dual potential z with <z, 1> = 0. Construction projects onto the
// zero-sum subspace; entropic potentials carry their eps.
class PotentialVector {
 public:
  PotentialVector() = default;
  explicit PotentialVector(Vector values, std::optional<double> epsilon = std::nullopt);

  static PotentialVector zeros(std::size_t n) { return PotentialVector(Vector::Zero(static_cast<Eigen::Index>(n))); }

  const Vector& values() const { return values_; }
  double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
  bool is_entropic() const { return epsilon_.has_value(); }
  std::optional<double> epsilon() const { return epsilon_; }

 private:
  Vector values_;
  std::optional<double> epsilon_;
};

// A convex cell of the diagram. 2D: counterclockwise polygon, labels[k] is
// the neighbour index that generated the edge vertices[k] -> vertices[k+1]
// (-1 for the domain boundary). 1D: vertices are the two endpoints and
// labels the neighbour across each endpoint.
struct Cell {
  bool empty = true;
  std::vector<Point> vertices;
  std::vector<int> labels;
};

// Common face of cells i < j: a point in 1D, a segment in 2D.
struct Facet {
  int i = 0;
  int j = 0;
  std::vector<Point> vertices;
  Point direction;  // (y_i - y_j) / |y_i - y_j|^2
};

class LaguerreDiagram {
 public:
  LaguerreDiagram(Domain domain, std::vector<Point> sites, Vector potential,
                  std::vector<Cell> cells, std::vector<Facet> facets, std::vector<std::string> warnings);

  int dim() const { return domain_.dim(); }
  std::size_t size() const { return sites_.size(); }
  const Domain& domain() const { return domain_; }
  const std::vector<Point>& sites() const { return sites_; }
  const Vector& potential() const { return potential_; }
  const std::vector<Cell>& cells() const { return cells_; }
  const Cell& cell(std::size_t i) const { return cells_.at(i); }
  const std::vector<Facet>& facets() const { return facets_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  // Facet shared by i and j in either order, if any.
  const Facet* find_facet(int i, int j) const;

  // Lowest index whose closed cell contains x, -1 when x is outside the domain.
  int locate(const Point& x, double tol = 1e-12) const;

  // <y_i - y_j, x> - z_i + z_j
  double slack(int i, int j, const Point& x) const;

  // Plain-text dump: one block per cell (mass, vertex list) followed by the facet table.
  void dump(std::ostream& os, const SourceMeasure& source) const;

 private:
  Domain domain_;
  std::vector<Point> sites_;
  Vector potential_;
  std::vector<Cell> cells_;
  std::vector<Facet> facets_;
  std::vector<std::string> warnings_;
};

LaguerreDiagram build_diagram(const SourceMeasure& source, const DiscreteMeasure& target,
                              const Vector& z);
LaguerreDiagram build_diagram(const SourceMeasure& source, const DiscreteMeasure& target,
                              const PotentialVector& z);

double cell_mass(const LaguerreDiagram& diag, const SourceMeasure& source, std::size_t i);
Vector cell_masses(const LaguerreDiagram& diag, const SourceMeasure& source);

// Integral of f * rho over cell i.
double cell_integral(const LaguerreDiagram& diag, const SourceMeasure& source, std::size_t i,
                     const ScalarField& f);

using VectorField = std::function<Point(const Point&)>;

// Unweighted: integral of rho over the common face of C_i and C_j.
double facet_integral(const LaguerreDiagram& diag, const SourceMeasure& source, int i, int j);
// Weighted: integral of <y_j - y_i, phi(x)> rho(x) over the common face.
double facet_integral(const LaguerreDiagram& diag, const SourceMeasure& source, int i, int j,
                      const VectorField& phi);

// Integral over the level set {x in C_i : slack_ij(x) = t}, optionally weighted
// by <y_j - y_i, phi(x)>.
double level_set_integral(const LaguerreDiagram& diag, const SourceMeasure& source, int i, int j,
                          double t);
double level_set_integral(const LaguerreDiagram& diag, const SourceMeasure& source, int i, int j,
                          double t, const VectorField& phi);

// d(cell masses)/dz: symmetric, zero row sums, negative semidefinite.
Matrix mass_jacobian(const LaguerreDiagram& diag, const SourceMeasure& source);

}  // namespace sdot
