#include "sdot/maps.hpp"

#include <fmt/format.h>

namespace sdot {

namespace {

double epsilon_of(const PotentialVector& z) {
  if (!z.epsilon()) throw ArgumentError("entropic map needs a potential carrying eps");
  return *z.epsilon();
}

}  // namespace

double delta(const DiscreteMeasure& target, const PotentialVector& z, int i, int j, const Point& x) {
  if (i == j) throw ArgumentError("delta needs i != j");
  const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
  return (target.point(ui) - target.point(uj)).dot(x) - z[ui] + z[uj];
}

Point brenier_eval(const LaguerreDiagram& diag, const Point& x) {
  const int i = diag.locate(x);
  if (i < 0) throw DomainError(fmt::format("point ({}, {}) lies outside the domain", x.x(), x.y()));
  return diag.sites()[static_cast<std::size_t>(i)];
}

std::vector<Point> brenier_eval(const LaguerreDiagram& diag, std::span<const Point> xs) {
  std::vector<Point> out;
  out.reserve(xs.size());
  for (const Point& x : xs) out.push_back(brenier_eval(diag, x));
  return out;
}

Vector entropic_weights(std::span<const Point> sites, const Vector& z, double eps, const Point& x) {
  if (!(eps > 0.0)) throw ArgumentError("eps must be positive");
  const auto n = static_cast<Eigen::Index>(sites.size());
  Vector w(n);
  for (Eigen::Index i = 0; i < n; ++i)
    w[i] = kLogitScale * (sites[static_cast<std::size_t>(i)].dot(x) - z[i]) / eps;
  w = (w.array() - w.maxCoeff()).exp();
  return w / w.sum();
}

Point entropic_offset(std::span<const Point> sites, const Vector& z, double eps, const Point& x,
                      const Point& y_ref) {
  const Vector w = entropic_weights(sites, z, eps, x);
  Point out = Point::Zero();
  for (std::size_t j = 0; j < sites.size(); ++j) out += w[static_cast<Eigen::Index>(j)] * (sites[j] - y_ref);
  return out;
}

Point entropic_eval(const DiscreteMeasure& target, const PotentialVector& z, const Point& x) {
  const Vector w = entropic_weights(target.points(), z.values(), epsilon_of(z), x);
  Point out = Point::Zero();
  for (std::size_t j = 0; j < target.size(); ++j) out += w[static_cast<Eigen::Index>(j)] * target.point(j);
  return out;
}

std::vector<Point> entropic_eval(const DiscreteMeasure& target, const PotentialVector& z,
                                 std::span<const Point> xs) {
  std::vector<Point> out;
  out.reserve(xs.size());
  for (const Point& x : xs) out.push_back(entropic_eval(target, z, x));
  return out;
}

}  // namespace sdot
