#include "sdot/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>

namespace sdot {

ValidationError::ValidationError(std::vector<std::string> violations)
    : Error([&] {
        std::string msg = "validation failed:";
        for (const auto& v : violations) msg += "\n  - " + v;
        return msg;
      }()),
      violations_(std::move(violations)) {}

// ---------------------------------------------------------------- Domain

Domain Domain::interval(double lo, double hi) {
  if (!(std::isfinite(lo) && std::isfinite(hi) && hi > lo))
    throw ValidationError({fmt::format("domain interval [{}, {}] must be finite with lo < hi", lo, hi)});
  Domain d;
  d.dim_ = 1;
  d.lo_ = lo;
  d.hi_ = hi;
  d.vertices_ = {Point(lo, 0.0), Point(hi, 0.0)};
  return d;
}

Domain Domain::polygon(std::vector<Point> vertices) {
  std::vector<std::string> errors;
  if (vertices.size() < 3) {
    errors.push_back("domain polygon needs at least 3 vertices");
    throw ValidationError(errors);
  }
  for (const Point& v : vertices)
    if (!v.allFinite()) errors.push_back("domain polygon has a non-finite vertex");
  const double area = polygon_area(vertices);
  if (!(area > 1e-14)) errors.push_back("domain polygon must be counterclockwise with nonempty interior");
  const std::size_t n = vertices.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Point e1 = vertices[(k + 1) % n] - vertices[k];
    const Point e2 = vertices[(k + 2) % n] - vertices[(k + 1) % n];
    const double cross = e1.x() * e2.y() - e1.y() * e2.x();
    if (cross < -1e-12 * e1.norm() * e2.norm()) {
      errors.push_back(fmt::format("domain polygon is not convex at vertex {}", (k + 1) % n));
      break;
    }
  }
  if (!errors.empty()) throw ValidationError(errors);
  Domain d;
  d.dim_ = 2;
  d.vertices_ = std::move(vertices);
  return d;
}

bool Domain::contains(const Point& x, double tol) const {
  if (dim_ == 1) return x.x() >= lo_ - tol && x.x() <= hi_ + tol;
  const std::size_t n = vertices_.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Point& a = vertices_[k];
    const Point e = vertices_[(k + 1) % n] - a;
    const Point r = x - a;
    if (e.x() * r.y() - e.y() * r.x() < -tol * e.norm()) return false;
  }
  return true;
}

double Domain::diameter() const {
  double d = 0.0;
  for (const Point& a : vertices_)
    for (const Point& b : vertices_) d = std::max(d, (a - b).norm());
  return d;
}

double Domain::measure() const { return dim_ == 1 ? hi_ - lo_ : polygon_area(vertices_); }

Point Domain::centroid() const {
  if (dim_ == 1) return Point(0.5 * (lo_ + hi_), 0.0);
  // Area centroid.
  Point c = Point::Zero();
  double twice = 0.0;
  const std::size_t n = vertices_.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Point& p = vertices_[k];
    const Point& q = vertices_[(k + 1) % n];
    const double cr = p.x() * q.y() - p.y() * q.x();
    twice += cr;
    c += cr * (p + q);
  }
  return c / (3.0 * twice);
}

double Domain::max_norm() const {
  double m = 0.0;
  for (const Point& v : vertices_) m = std::max(m, v.norm());
  return m;
}

std::pair<Point, Point> Domain::bounding_box() const {
  Point lo = vertices_.front(), hi = vertices_.front();
  for (const Point& v : vertices_) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  return {lo, hi};
}

double Domain::inradius_about_centroid() const {
  const Point c = centroid();
  if (dim_ == 1) return std::min(c.x() - lo_, hi_ - c.x());
  double r = std::numeric_limits<double>::infinity();
  const std::size_t n = vertices_.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Point& a = vertices_[k];
    const Point e = vertices_[(k + 1) % n] - a;
    const Point rel = c - a;
    r = std::min(r, (e.x() * rel.y() - e.y() * rel.x()) / e.norm());
  }
  return r;
}

// ---------------------------------------------------------------- Density

Density Density::uniform() { return Density{}; }

Density Density::truncated_gaussian(Point mean, double sigma) {
  if (!(sigma > 0.0) || !mean.allFinite())
    throw ValidationError({"truncated_gaussian density needs finite mean and sigma > 0"});
  Density d;
  d.kind_ = Kind::kTruncatedGaussian;
  d.mean_ = mean;
  d.sigma_ = sigma;
  return d;
}

Density Density::piecewise_linear(std::vector<double> knots, std::vector<double> values) {
  std::vector<std::string> errors;
  if (knots.size() < 2 || knots.size() != values.size())
    errors.push_back("piecewise_linear density needs >= 2 knots and one value per knot");
  for (std::size_t k = 1; k < knots.size(); ++k)
    if (!(knots[k] > knots[k - 1])) errors.push_back("piecewise_linear knots must be increasing");
  for (double v : values)
    if (!(v > 0.0)) errors.push_back("piecewise_linear values must be positive");
  if (!errors.empty()) throw ValidationError(errors);
  Density d;
  d.kind_ = Kind::kPiecewiseLinear;
  d.knots_ = std::move(knots);
  d.values_ = std::move(values);
  return d;
}

std::string Density::kind_name() const {
  switch (kind_) {
    case Kind::kUniform: return "uniform";
    case Kind::kTruncatedGaussian: return "truncated_gaussian";
    case Kind::kPiecewiseLinear: return "piecewise_linear";
  }
  return "unknown";
}

double Density::raw(const Point& x) const {
  switch (kind_) {
    case Kind::kUniform: return 1.0;
    case Kind::kTruncatedGaussian: return std::exp(-(x - mean_).squaredNorm() / (2.0 * sigma_ * sigma_));
    case Kind::kPiecewiseLinear: {
      const double t = x.x();
      if (t <= knots_.front()) return values_.front();
      if (t >= knots_.back()) return values_.back();
      const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
      const std::size_t k = static_cast<std::size_t>(it - knots_.begin()) - 1;
      const double u = (t - knots_[k]) / (knots_[k + 1] - knots_[k]);
      return (1.0 - u) * values_[k] + u * values_[k + 1];
    }
  }
  return 0.0;
}

double Density::operator()(const Point& x) const { return scale_ * raw(x); }

void Density::bind(const Domain& domain, const QuadratureOptions& opts) {
  if (kind_ == Kind::kPiecewiseLinear && domain.dim() != 1)
    throw ValidationError({"piecewise_linear density is only supported in 1D"});
  scale_ = 1.0;
  if (kind_ == Kind::kUniform) {
    scale_ = 1.0 / domain.measure();
    return;
  }
  std::vector<WeightedPoint> nodes;
  if (domain.dim() == 1) {
    QuadratureOptions fine = opts;
    fine.panels_1d = std::max(opts.panels_1d, 64);
    append_interval_nodes(domain.lo(), domain.hi(), knots_, fine, nodes);
  } else {
    QuadratureOptions fine = opts;
    fine.refine_2d = std::max(opts.refine_2d, 3);
    append_polygon_nodes(domain.vertices(), fine, nodes);
  }
  double mass = 0.0;
  for (const auto& n : nodes) mass += n.weight * raw(n.x);
  scale_ = 1.0 / mass;
}

double Density::lipschitz_bound(const Domain& domain) const {
  switch (kind_) {
    case Kind::kUniform: return 0.0;
    case Kind::kTruncatedGaussian:
      // sup of |grad exp(-r^2 / 2 s^2)| is exp(-1/2) / s, attained at r = s.
      return scale_ * std::exp(-0.5) / sigma_;
    case Kind::kPiecewiseLinear: {
      double slope = 0.0;
      for (std::size_t k = 1; k < knots_.size(); ++k) {
        if (knots_[k] <= domain.lo() && k + 1 < knots_.size()) continue;
        slope = std::max(slope, std::abs(values_[k] - values_[k - 1]) / (knots_[k] - knots_[k - 1]));
      }
      return scale_ * slope;
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------- SourceMeasure

SourceMeasure::SourceMeasure(Domain domain, Density density, SourceBounds bounds,
                             QuadratureOptions quadrature)
    : domain_(std::move(domain)), density_(std::move(density)), quadrature_(quadrature) {
  std::vector<std::string> errors;
  if (quadrature_.panels_1d < 1 || quadrature_.panels_1d > 256)
    errors.push_back("quadrature.panels_1d must be in [1, 256]");
  if (!errors.empty()) throw ValidationError(errors);
  if (domain_.dim() == 2 && density_.kind() != Density::Kind::kUniform)
    quadrature_.refine_2d = std::max(quadrature_.refine_2d, 2);
  density_.bind(domain_, quadrature_);

  density_min_ = bounds.density_min;
  density_max_ = bounds.density_max;
  if (!(density_min_ > 0.0)) errors.push_back("source.density_min must be positive");
  if (!(density_max_ >= density_min_)) errors.push_back("source.density_max must be >= density_min");

  if (domain_.dim() == 1)
    nodes_ = interval_nodes(domain_.lo(), domain_.hi());
  else
    nodes_ = polygon_nodes(domain_.vertices());

  double mass = 0.0;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  const auto probe = [&](const Point& x) {
    const double r = density_(x);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  };
  for (const auto& n : nodes_) {
    mass += n.weight;
    probe(n.x);
  }
  for (const Point& v : domain_.vertices()) probe(v);
  const double slack = 1e-9 * std::max(1.0, hi);
  if (lo < density_min_ - slack)
    errors.push_back(fmt::format("density {} at a quadrature node is below source.density_min {}", lo, density_min_));
  if (hi > density_max_ + slack)
    errors.push_back(fmt::format("density {} at a quadrature node is above source.density_max {}", hi, density_max_));
  if (std::abs(mass - 1.0) > 1e-9)
    errors.push_back(fmt::format("density integrates to {} instead of 1", mass));

  const double analytic = density_.lipschitz_bound(domain_);
  if (bounds.lipschitz_bound) {
    if (*bounds.lipschitz_bound < analytic * (1.0 - 1e-12))
      errors.push_back(fmt::format("source.lipschitz_bound {} is below the analytic bound {}",
                                   *bounds.lipschitz_bound, analytic));
    lipschitz_bound_ = *bounds.lipschitz_bound;
  } else {
    lipschitz_bound_ = analytic;
  }
  if (!errors.empty()) throw ValidationError(errors);
}

std::vector<WeightedPoint> SourceMeasure::interval_nodes(double a, double b) const {
  std::vector<WeightedPoint> out;
  append_interval_nodes(a, b, density_.breakpoints(), quadrature_, out);
  for (auto& n : out) n.weight *= density_(n.x);
  return out;
}

std::vector<WeightedPoint> SourceMeasure::polygon_nodes(std::span<const Point> polygon) const {
  std::vector<WeightedPoint> out;
  append_polygon_nodes(polygon, quadrature_, out);
  for (auto& n : out) n.weight *= density_(n.x);
  return out;
}

double integrate_nodes(std::span<const WeightedPoint> nodes, const ScalarField& f) {
  double sum = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const double v = f(nodes[k].x);
    if (!std::isfinite(v))
      throw EvaluationError(fmt::format("integrand is not finite at quadrature node {} (x = ({}, {}))", k,
                                        nodes[k].x.x(), nodes[k].x.y()));
    sum += v * nodes[k].weight;
  }
  return sum;
}

double integrate(const SourceMeasure& source, const ScalarField& f) {
  return integrate_nodes(source.nodes(), f);
}

std::vector<Point> sample(const SourceMeasure& source, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ArgumentError("sample size must be >= 1");
  std::mt19937_64 rng(seed);
  const auto [lo, hi] = source.domain().bounding_box();
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double cap = source.density_max();
  std::vector<Point> out;
  out.reserve(n);
  std::size_t tries = 0;
  while (out.size() < n) {
    ++tries;
    Point x(lo.x() + (hi.x() - lo.x()) * u01(rng), 0.0);
    if (source.dim() == 2) x.y() = lo.y() + (hi.y() - lo.y()) * u01(rng);
    const double accept = u01(rng);
    if (source.domain().contains(x, 0.0) && accept * cap <= source.density_at(x)) out.push_back(x);
    if (tries >= 10'000'000 && static_cast<double>(out.size()) < 1e-6 * static_cast<double>(tries))
      throw SamplingError("rejection sampling acceptance rate fell below 1e-6");
  }
  return out;
}

// ---------------------------------------------------------------- DiscreteMeasure

DiscreteMeasure::DiscreteMeasure(int dim, std::vector<Point> points, Vector weights,
                                 double min_weight_floor)
    : dim_(dim), points_(std::move(points)), weights_(std::move(weights)),
      min_weight_floor_(min_weight_floor) {
  std::vector<std::string> errors;
  if (dim_ != 1 && dim_ != 2)
    errors.push_back(fmt::format("dimension {} is not supported (only d = 1 or d = 2)", dim_));
  if (points_.empty()) errors.push_back("target needs at least one support point");
  if (static_cast<std::size_t>(weights_.size()) != points_.size())
    errors.push_back("target.weights must have one entry per support point");
  if (!errors.empty()) throw ValidationError(errors);

  for (Eigen::Index i = 0; i < weights_.size(); ++i)
    if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i]))
      errors.push_back(fmt::format("target weight q_{} = {} must be positive", i + 1, weights_[i]));
  if (!errors.empty()) throw ValidationError(errors);
  weights_ /= weights_.sum();
  if (!(min_weight_floor_ > 0.0 && min_weight_floor_ <= 1.0))
    errors.push_back("target.min_weight must be in (0, 1]");
  if (weights_.minCoeff() < min_weight_floor_)
    errors.push_back(fmt::format("min_i q_i = {} is below the floor c0 = {}", weights_.minCoeff(),
                                 min_weight_floor_));
  for (const Point& p : points_) {
    if (!p.allFinite()) errors.push_back("target has a non-finite support point");
    if (dim_ == 1 && p.y() != 0.0) errors.push_back("1D support points must have zero second coordinate");
  }
  min_pair_distance_ = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points_.size(); ++i)
    for (std::size_t j = i + 1; j < points_.size(); ++j)
      min_pair_distance_ = std::min(min_pair_distance_, (points_[i] - points_[j]).norm());
  if (!(min_pair_distance_ > 0.0)) errors.push_back("target support points must be pairwise distinct");
  if (!errors.empty()) throw ValidationError(errors);
}

DiscreteMeasure DiscreteMeasure::empirical(const DiscreteMeasure& base,
                                           const std::vector<std::size_t>& counts) {
  if (counts.size() != base.size()) throw ArgumentError("one count per support point is required");
  const std::size_t n = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  if (n == 0) throw ArgumentError("empirical measure needs at least one observation");
  DiscreteMeasure m;
  m.dim_ = base.dim_;
  m.points_ = base.points_;
  m.weights_.resize(static_cast<Eigen::Index>(counts.size()));
  for (std::size_t i = 0; i < counts.size(); ++i)
    m.weights_[static_cast<Eigen::Index>(i)] = static_cast<double>(counts[i]) / static_cast<double>(n);
  m.min_weight_floor_ = 1.0 / static_cast<double>(n);
  m.min_pair_distance_ = base.min_pair_distance_;
  return m;
}

Point DiscreteMeasure::mean() const {
  Point m = Point::Zero();
  for (std::size_t i = 0; i < points_.size(); ++i) m += weight(i) * points_[i];
  return m;
}

double DiscreteMeasure::support_diameter() const {
  double d = 0.0;
  for (const Point& a : points_)
    for (const Point& b : points_) d = std::max(d, (a - b).norm());
  return d;
}

bool DiscreteMeasure::has_zero_atoms() const { return (weights_.array() <= 0.0).any(); }

std::vector<std::size_t> DiscreteMeasure::zero_atoms() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < size(); ++i)
    if (weight(i) <= 0.0) out.push_back(i);
  return out;
}

DiscreteMeasure DiscreteMeasure::without_zero_atoms(std::vector<std::size_t>& kept) const {
  kept.clear();
  std::vector<Point> pts;
  std::vector<double> w;
  for (std::size_t i = 0; i < size(); ++i) {
    if (weight(i) > 0.0) {
      kept.push_back(i);
      pts.push_back(points_[i]);
      w.push_back(weight(i));
    }
  }
  const double floor = std::min(min_weight_floor_, *std::min_element(w.begin(), w.end()));
  return DiscreteMeasure(dim_, std::move(pts), Eigen::Map<const Vector>(w.data(), static_cast<Eigen::Index>(w.size())),
                         floor);
}

DiscreteMeasure sample_discrete(const DiscreteMeasure& target, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ArgumentError("sample size must be >= 1");
  std::mt19937_64 rng(seed);
  const Vector& q = target.weights();
  std::discrete_distribution<std::size_t> pick(q.data(), q.data() + q.size());
  std::vector<std::size_t> counts(target.size(), 0);
  for (std::size_t k = 0; k < n; ++k) ++counts[pick(rng)];
  return DiscreteMeasure::empirical(target, counts);
}

}  // namespace sdot
