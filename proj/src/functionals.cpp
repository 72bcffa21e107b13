#include "sdot/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "sdot/maps.hpp"

namespace sdot {

namespace {

Point random_point(const Domain& domain, std::mt19937_64& rng) {
  const auto [lo, hi] = domain.bounding_box();
  std::uniform_real_distribution<double> ux(lo.x(), hi.x()), uy(lo.y(), hi.y());
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const Point x(ux(rng), domain.dim() == 1 ? 0.0 : uy(rng));
    if (domain.contains(x)) return x;
  }
  throw SamplingError("could not draw a point inside the domain");
}

double farthest_distance(const Domain& domain, const Point& c) {
  if (domain.dim() == 1) return std::max(std::abs(domain.lo() - c.x()), std::abs(domain.hi() - c.x()));
  double best = 0.0;
  for (const Point& v : domain.vertices()) best = std::max(best, (v - c).norm());
  return best;
}

Point radial_power(const Point& d, double alpha) {
  const double r = d.norm();
  if (r == 0.0) return Point::Zero();
  return alpha == 1.0 ? d : Point(d * std::pow(r, alpha - 1.0));
}

}  // namespace

CertificateResult certify(const TestField& field, const Domain& domain, std::uint64_t seed, std::size_t pairs) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  CertificateResult out;
  for (std::size_t k = 0; k < pairs; ++k) {
    const Point x = random_point(domain, rng);
    Point y;
    if (k % 2 == 0) {
      y = random_point(domain, rng);
    } else {
      // Nearby partner at a log-uniform separation.
      const double r = domain.diameter() * std::pow(10.0, -6.0 * unit(rng));
      const double theta = 2.0 * std::numbers::pi * unit(rng);
      y = domain.dim() == 1 ? Point(x.x() + (theta < std::numbers::pi ? r : -r), 0.0)
                            : Point(x + r * Point(std::cos(theta), std::sin(theta)));
      if (!domain.contains(y)) y = x;
    }
    const Point fx = field(x), fy = field(y);
    out.max_value = std::max({out.max_value, fx.norm(), fy.norm()});
    const double sep = (x - y).norm();
    if (sep > 0.0) out.max_ratio = std::max(out.max_ratio, (fx - fy).norm() / std::pow(sep, field.alpha));
  }
  const double slack = 1.0 + 1e-12;
  out.passed = out.max_value <= field.holder_bound * slack && out.max_ratio <= field.holder_bound * slack;
  return out;
}

TestField identity_field(const Domain& domain, bool normalized) {
  const double bound = domain.max_norm() + 1.0;
  const double scale = normalized ? 1.0 / bound : 1.0;
  return {[scale](const Point& x) { return Point(scale * x); }, 1.0, normalized ? 1.0 : bound,
          normalized ? "id_normalized" : "id", {scale}};
}

TestField power_field(const Domain& domain, double alpha, const Point& center, bool normalized) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ArgumentError("alpha must lie in (0, 1]");
  const double bound = std::pow(farthest_distance(domain, center), alpha) + std::pow(2.0, 1.0 - alpha);
  const double scale = normalized ? 1.0 / bound : 1.0;
  return {[alpha, center, scale](const Point& x) { return Point(scale * radial_power(x - center, alpha)); },
          alpha, normalized ? 1.0 : bound, fmt::format("power(alpha={}, center=({}, {}))", alpha, center.x(), center.y()),
          {center.x(), center.y(), scale}};
}

TestField sign_field(double cut) {
  return {[cut](const Point& x) { return Point(x.x() > cut ? 1.0 : (x.x() < cut ? -1.0 : 0.0), 0.0); }, 0.0, 3.0,
          fmt::format("sign(x1 - {})", cut), {cut}};
}

std::vector<TestField> make_test_family(double alpha, std::size_t count, std::uint64_t seed, const Domain& domain) {
  if (count < 1) throw ArgumentError("test family needs at least one field");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ArgumentError("alpha must lie in (0, 1]");
  std::vector<TestField> family;

  // (a) coordinate fields and id, normalized by sup|x| + diam^(1 - alpha).
  const double coord_bound = domain.max_norm() + std::pow(domain.diameter(), 1.0 - alpha);
  const double cs = 1.0 / coord_bound;
  if (domain.dim() == 2) {
    family.push_back({[cs](const Point& x) { return Point(cs * x.x(), 0.0); }, alpha, 1.0, "coord_1", {cs}});
    family.push_back({[cs](const Point& x) { return Point(0.0, cs * x.y()); }, alpha, 1.0, "coord_2", {cs}});
  }
  family.push_back({[cs](const Point& x) { return Point(cs * x); }, alpha, 1.0, "id", {cs}});
  if (family.size() >= count) {
    family.resize(count);
    return family;
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t rest = count - family.size();
  const std::size_t radial = (rest + 1) / 2;

  // (b) radial power fields.
  for (std::size_t k = 0; k < radial; ++k) {
    const Point c = random_point(domain, rng);
    TestField f = power_field(domain, alpha, c, true);
    f.label = fmt::format("radial_{}", k);
    family.push_back(std::move(f));
  }

  // (c) superpositions of three bumps v max(0, 1 - (|x - x0| / r)^alpha).
  struct Bump {
    Point center, dir;
    double radius, coef;
  };
  for (std::size_t k = radial; k < rest; ++k) {
    std::vector<Bump> bumps;
    std::vector<double> params;
    double bound = 0.0;
    for (int b = 0; b < 3; ++b) {
      Bump bump;
      bump.center = random_point(domain, rng);
      const double theta = 2.0 * std::numbers::pi * unit(rng);
      bump.dir = domain.dim() == 1 ? Point(theta < std::numbers::pi ? 1.0 : -1.0, 0.0)
                                   : Point(std::cos(theta), std::sin(theta));
      bump.radius = domain.diameter() * (0.2 + 0.8 * unit(rng));
      bump.coef = 2.0 * unit(rng) - 1.0;
      bound += std::abs(bump.coef) * (1.0 + std::pow(bump.radius, -alpha));
      params.insert(params.end(), {bump.center.x(), bump.center.y(), bump.dir.x(), bump.dir.y(), bump.radius, bump.coef});
      bumps.push_back(bump);
    }
    for (Bump& bump : bumps) bump.coef /= bound;
    family.push_back({[bumps, alpha](const Point& x) {
                        Point out = Point::Zero();
                        for (const Bump& b : bumps) {
                          const double h = 1.0 - std::pow((x - b.center).norm() / b.radius, alpha);
                          if (h > 0.0) out += b.coef * h * b.dir;
                        }
                        return out;
                      },
                      alpha, 1.0, fmt::format("bumps_{}", k - radial), std::move(params)});
  }
  return family;
}

Vector pair_maps(std::span<const TestField> family, std::span<const Point> sites, const Vector& z, double eps,
                 const LaguerreDiagram& diag_ref, const SourceMeasure& source, const GradedOptions& quad) {
  if (z.size() != static_cast<Eigen::Index>(sites.size())) throw ArgumentError("potential and sites differ in length");
  if (diag_ref.dim() != source.dim()) throw ArgumentError("diagram and source differ in dimension");
  GradedOptions q = quad;
  q.eps = eps;
  const auto nodes = graded_cell_nodes(diag_ref, source, q);
  std::vector<long double> acc(family.size(), 0.0L);
  for (const CellNode& node : nodes) {
    const Point off = entropic_offset(sites, z, eps, node.x, diag_ref.sites()[static_cast<std::size_t>(node.cell)]);
    if (off.x() == 0.0 && off.y() == 0.0) continue;
    for (std::size_t f = 0; f < family.size(); ++f)
      acc[f] += static_cast<long double>(node.weight * family[f](node.x).dot(off));
  }
  Vector out(static_cast<Eigen::Index>(family.size()));
  for (std::size_t f = 0; f < family.size(); ++f) {
    out[static_cast<Eigen::Index>(f)] = static_cast<double>(acc[f]);
    if (!std::isfinite(out[static_cast<Eigen::Index>(f)]))
      throw EvaluationError(fmt::format("pairing with field '{}' is not finite", family[f].label));
  }
  return out;
}

double l2_sq_maps(std::span<const Point> sites, const Vector& z, double eps, const LaguerreDiagram& diag_ref,
                  const SourceMeasure& source, const GradedOptions& quad) {
  if (z.size() != static_cast<Eigen::Index>(sites.size())) throw ArgumentError("potential and sites differ in length");
  GradedOptions q = quad;
  q.eps = eps;
  long double acc = 0.0L;
  for (const CellNode& node : graded_cell_nodes(diag_ref, source, q)) {
    const Point off = entropic_offset(sites, z, eps, node.x, diag_ref.sites()[static_cast<std::size_t>(node.cell)]);
    acc += static_cast<long double>(node.weight * off.squaredNorm());
  }
  return static_cast<double>(acc);
}

namespace {

double checked_eps(const PotentialVector& z_eps, const LaguerreDiagram& diag0, const SourceMeasure& source) {
  if (!z_eps.epsilon()) throw ArgumentError("pairing needs an entropic potential");
  if (z_eps.size() != diag0.size()) throw ArgumentError("entropic potential and diagram have different targets");
  if (diag0.dim() != source.dim()) throw ArgumentError("diagram and source differ in dimension");
  return *z_eps.epsilon();
}

}  // namespace

double pair_difference(const TestField& phi, const PotentialVector& z_eps, const LaguerreDiagram& diag0,
                       const SourceMeasure& source) {
  const double eps = checked_eps(z_eps, diag0, source);
  return pair_maps(std::span(&phi, 1), diag0.sites(), z_eps.values(), eps, diag0, source)[0];
}

double l2_sq_distance(const PotentialVector& z_eps, const LaguerreDiagram& diag0, const SourceMeasure& source) {
  const double eps = checked_eps(z_eps, diag0, source);
  return l2_sq_maps(diag0.sites(), z_eps.values(), eps, diag0, source);
}

double dual_norm_lower_bound(const PotentialVector& z_eps, const LaguerreDiagram& diag0, const SourceMeasure& source,
                             std::span<const TestField> family) {
  if (family.empty()) throw ArgumentError("test family is empty");
  for (const TestField& f : family)
    if (f.holder_bound > 1.0 + 1e-12) throw ArgumentError(fmt::format("field '{}' is not in the unit ball", f.label));
  const double eps = checked_eps(z_eps, diag0, source);
  return pair_maps(family, diag0.sites(), z_eps.values(), eps, diag0, source).cwiseAbs().maxCoeff();
}

}  // namespace sdot
