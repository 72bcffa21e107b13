#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sdot/quadrature.hpp"
#include "sdot/types.hpp"

namespace sdot {

// Compact convex support of the source measure: an interval in 1D or a
// counterclockwise convex polygon in 2D.
class Domain {
 public:
  static Domain interval(double lo, double hi);
  static Domain polygon(std::vector<Point> vertices);

  int dim() const { return dim_; }
  // Interval endpoints (1D only).
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  // Polygon vertices in 2D; the two endpoints in 1D.
  const std::vector<Point>& vertices() const { return vertices_; }

  bool contains(const Point& x, double tol = 1e-12) const;
  double diameter() const;
  double measure() const;  // length or area
  Point centroid() const;
  double max_norm() const;  // sup over the domain of |x|
  std::pair<Point, Point> bounding_box() const;
  // Radius of a disk (interval) around centroid() contained in the domain.
  double inradius_about_centroid() const;

 private:
  int dim_ = 1;
  double lo_ = 0.0, hi_ = 0.0;
  std::vector<Point> vertices_;
};

// Shipped density families. Values are normalized to unit mass on the domain.
class Density {
 public:
  enum class Kind { kUniform, kTruncatedGaussian, kPiecewiseLinear };

  static Density uniform();
  static Density truncated_gaussian(Point mean, double sigma);
  // 1D only: positive values at increasing knots; constant extension outside.
  static Density piecewise_linear(std::vector<double> knots, std::vector<double> values);

  Kind kind() const { return kind_; }
  std::string kind_name() const;

  // Fixes the normalization for a given domain; called by SourceMeasure.
  void bind(const Domain& domain, const QuadratureOptions& opts);

  double operator()(const Point& x) const;
  // Analytic Lipschitz bound of the normalized density.
  double lipschitz_bound(const Domain& domain) const;
  // Kinks of the density (1D), used as quadrature breakpoints.
  const std::vector<double>& breakpoints() const { return knots_; }

  const Point& mean() const { return mean_; }
  double sigma() const { return sigma_; }
  const std::vector<double>& values() const { return values_; }

 private:
  double raw(const Point& x) const;

  Kind kind_ = Kind::kUniform;
  Point mean_ = Point::Zero();
  double sigma_ = 1.0;
  std::vector<double> knots_;
  std::vector<double> values_;
  double scale_ = 1.0;
};

struct SourceBounds {
  double density_min = 0.0;
  double density_max = 0.0;
  std::optional<double> lipschitz_bound;
};

// Absolutely continuous input measure P with density rho on a convex domain.
// Immutable after construction.
class SourceMeasure {
 public:
  SourceMeasure(Domain domain, Density density, SourceBounds bounds,
                QuadratureOptions quadrature = {});

  const Domain& domain() const { return domain_; }
  const Density& density() const { return density_; }
  int dim() const { return domain_.dim(); }
  double density_at(const Point& x) const { return density_(x); }
  double lipschitz_bound() const { return lipschitz_bound_; }
  double density_min() const { return density_min_; }
  double density_max() const { return density_max_; }
  const QuadratureOptions& quadrature() const { return quadrature_; }

  // Nodes of the domain rule with weights already multiplied by rho.
  const std::vector<WeightedPoint>& nodes() const { return nodes_; }

  // Rule over a convex subregion (interval [a, b] or polygon), weights
  // multiplied by rho. 1D rules are split at density kinks.
  std::vector<WeightedPoint> interval_nodes(double a, double b) const;
  std::vector<WeightedPoint> polygon_nodes(std::span<const Point> polygon) const;

 private:
  Domain domain_;
  Density density_;
  QuadratureOptions quadrature_;
  double lipschitz_bound_ = 0.0;
  double density_min_ = 0.0;
  double density_max_ = 0.0;
  std::vector<WeightedPoint> nodes_;
};

using ScalarField = std::function<double(const Point&)>;

// Integral of f * rho over the domain.
double integrate(const SourceMeasure& source, const ScalarField& f);

// Sum of f(x_k) * w_k over a node set; non-finite values raise EvaluationError.
double integrate_nodes(std::span<const WeightedPoint> nodes, const ScalarField& f);

std::vector<Point> sample(const SourceMeasure& source, std::size_t n, std::uint64_t seed);

// Finitely supported output measure Q.
class DiscreteMeasure {
 public:
  // Validates q_i > 0, q_i >= c0 and distinct points; normalizes q to sum 1.
  DiscreteMeasure(int dim, std::vector<Point> points, Vector weights, double min_weight_floor);

  // Empirical measure on the same support; zero-count atoms are retained
  // and flagged.
  static DiscreteMeasure empirical(const DiscreteMeasure& base, const std::vector<std::size_t>& counts);

  int dim() const { return dim_; }
  std::size_t size() const { return points_.size(); }
  const std::vector<Point>& points() const { return points_; }
  const Point& point(std::size_t i) const { return points_[i]; }
  const Vector& weights() const { return weights_; }
  double weight(std::size_t i) const { return weights_[static_cast<Eigen::Index>(i)]; }
  double min_weight_floor() const { return min_weight_floor_; }
  double min_pair_distance() const { return min_pair_distance_; }
  Point mean() const;
  double support_diameter() const;

  bool has_zero_atoms() const;
  std::vector<std::size_t> zero_atoms() const;
  // Drops zero-weight atoms; `kept` receives the original index of each kept atom.
  DiscreteMeasure without_zero_atoms(std::vector<std::size_t>& kept) const;

 private:
  DiscreteMeasure() = default;

  int dim_ = 1;
  std::vector<Point> points_;
  Vector weights_;
  double min_weight_floor_ = 0.0;
  double min_pair_distance_ = 0.0;
};

DiscreteMeasure sample_discrete(const DiscreteMeasure& target, std::size_t n, std::uint64_t seed);

}  // namespace sdot
