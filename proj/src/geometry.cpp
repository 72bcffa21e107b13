#include "sdot/geometry.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace sdot {

namespace {

constexpr double kVertexTol = 1e-12;
constexpr double kMinArea = 1e-14;

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

struct ClipPolygon {
  std::vector<Point> v;
  std::vector<int> label;
};

// Keeps {x : <a, x> >= b}; the new edge along the clip line gets `line_label`.
ClipPolygon clip(const ClipPolygon& poly, const Point& a, double b, int line_label) {
  ClipPolygon out;
  const std::size_t n = poly.v.size();
  if (n == 0) return out;
  const double tol = kVertexTol * std::max(1.0, a.norm());
  std::vector<double> s(n);
  for (std::size_t k = 0; k < n; ++k) s[k] = a.dot(poly.v[k]) - b;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t m = (k + 1) % n;
    const bool p_in = s[k] >= -tol;
    const bool q_in = s[m] >= -tol;
    if (p_in) {
      if (q_in) {
        out.v.push_back(poly.v[k]);
        out.label.push_back(poly.label[k]);
      } else {
        out.v.push_back(poly.v[k]);
        const double lambda = std::max(0.0, s[k]) / (std::max(0.0, s[k]) - s[m]);
        const Point x = poly.v[k] + lambda * (poly.v[m] - poly.v[k]);
        out.label.push_back(poly.label[k]);
        out.v.push_back(x);
        out.label.push_back(line_label);
      }
    } else if (q_in) {
      const double lambda = s[k] / (s[k] - std::max(0.0, s[m]));
      const Point x = poly.v[k] + lambda * (poly.v[m] - poly.v[k]);
      out.v.push_back(x);
      out.label.push_back(poly.label[k]);
    }
  }
  return out;
}

// Drops zero-length edges; the surviving vertex keeps the outgoing label.
void drop_duplicate_vertices(ClipPolygon& poly, double tol) {
  bool changed = true;
  while (changed && poly.v.size() > 1) {
    changed = false;
    const std::size_t n = poly.v.size();
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t m = (k + 1) % n;
      if ((poly.v[k] - poly.v[m]).norm() <= tol) {
        poly.v.erase(poly.v.begin() + static_cast<std::ptrdiff_t>(k));
        poly.label.erase(poly.label.begin() + static_cast<std::ptrdiff_t>(k));
        changed = true;
        break;
      }
    }
  }
}

// Segment of the line {<a, x> = c} inside a convex polygon.
std::optional<std::pair<Point, Point>> line_polygon_section(const std::vector<Point>& poly,
                                                            const Point& a, double c) {
  const std::size_t n = poly.size();
  if (n < 3) return std::nullopt;
  const double tol = kVertexTol * std::max(1.0, a.norm());
  std::vector<Point> hits;
  for (std::size_t k = 0; k < n; ++k) {
    const Point& p = poly[k];
    const Point& q = poly[(k + 1) % n];
    const double sp = a.dot(p) - c;
    const double sq = a.dot(q) - c;
    if (std::abs(sp) <= tol) hits.push_back(p);
    if ((sp > tol && sq < -tol) || (sp < -tol && sq > tol)) hits.push_back(p + sp / (sp - sq) * (q - p));
  }
  if (hits.size() < 2) return std::nullopt;
  const Point dir(-a.y(), a.x());
  auto [lo, hi] = std::minmax_element(hits.begin(), hits.end(),
                                      [&](const Point& u, const Point& v) { return dir.dot(u) < dir.dot(v); });
  if ((*hi - *lo).norm() <= tol) return std::nullopt;
  return std::make_pair(*lo, *hi);
}

double segment_integral(const SourceMeasure& source, const Point& p, const Point& q,
                        const ScalarField& f) {
  const double len = (q - p).norm();
  if (len == 0.0) return 0.0;
  const GaussRule& rule = gauss_legendre(source.quadrature().order_1d);
  double sum = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const Point x = p + 0.5 * (rule.nodes[k] + 1.0) * (q - p);
    sum += rule.weights[k] * f(x) * source.density_at(x);
  }
  return 0.5 * len * sum;
}

ScalarField pairing_weight(const LaguerreDiagram& diag, int i, int j, const VectorField* phi) {
  if (phi == nullptr) return [](const Point&) { return 1.0; };
  const Point d = diag.sites()[static_cast<std::size_t>(j)] - diag.sites()[static_cast<std::size_t>(i)];
  return [d, phi](const Point& x) { return d.dot((*phi)(x)); };
}

void check_pair(const LaguerreDiagram& diag, int i, int j) {
  const int n = static_cast<int>(diag.size());
  if (i < 0 || j < 0 || i >= n || j >= n) throw ArgumentError("facet index out of range");
  if (i == j) throw ArgumentError("facet integrals need distinct indices i != j");
}

double facet_integral_impl(const LaguerreDiagram& diag, const SourceMeasure& source, int i, int j,
                           const VectorField* phi) {
  check_pair(diag, i, j);
  const Facet* f = diag.find_facet(i, j);
  if (f == nullptr) return 0.0;
  const ScalarField w = pairing_weight(diag, i, j, phi);
  if (diag.dim() == 1) return w(f->vertices[0]) * source.density_at(f->vertices[0]);
  return segment_integral(source, f->vertices[0], f->vertices[1], w);
}

double level_set_impl(const LaguerreDiagram& diag, const SourceMeasure& source, int i, int j, double t,
                      const VectorField* phi) {
  check_pair(diag, i, j);
  if (t < 0.0) throw ArgumentError("level set parameter t must be nonnegative");
  const Cell& cell = diag.cell(static_cast<std::size_t>(i));
  if (cell.empty) return 0.0;
  const Point a = diag.sites()[static_cast<std::size_t>(i)] - diag.sites()[static_cast<std::size_t>(j)];
  const double c = diag.potential()[i] - diag.potential()[j] + t;
  const ScalarField w = pairing_weight(diag, i, j, phi);
  if (diag.dim() == 1) {
    const double x = c / a.x();
    const double tol = kVertexTol * std::max(1.0, std::abs(x));
    if (x < cell.vertices[0].x() - tol || x > cell.vertices[1].x() + tol) return 0.0;
    const Point p(x, 0.0);
    return w(p) * source.density_at(p);
  }
  const auto seg = line_polygon_section(cell.vertices, a, c);
  if (!seg) return 0.0;
  return segment_integral(source, seg->first, seg->second, w);
}

}  // namespace

PotentialVector::PotentialVector(Vector values, std::optional<double> epsilon)
    : values_(std::move(values)), epsilon_(epsilon) {
  if (values_.size() > 0) values_.array() -= values_.mean();
  if (epsilon_ && !(*epsilon_ > 0.0)) throw ArgumentError("entropic potential needs eps > 0");
}

LaguerreDiagram::LaguerreDiagram(Domain domain, std::vector<Point> sites, Vector potential,
                                 std::vector<Cell> cells, std::vector<Facet> facets,
                                 std::vector<std::string> warnings)
    : domain_(std::move(domain)), sites_(std::move(sites)), potential_(std::move(potential)),
      cells_(std::move(cells)), facets_(std::move(facets)), warnings_(std::move(warnings)) {}

const Facet* LaguerreDiagram::find_facet(int i, int j) const {
  const int a = std::min(i, j), b = std::max(i, j);
  for (const Facet& f : facets_)
    if (f.i == a && f.j == b) return &f;
  return nullptr;
}

int LaguerreDiagram::locate(const Point& x, double tol) const {
  if (!domain_.contains(x, tol)) return -1;
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    const Cell& c = cells_[i];
    if (c.empty) continue;
    if (dim() == 1) {
      if (x.x() >= c.vertices[0].x() - tol && x.x() <= c.vertices[1].x() + tol) return static_cast<int>(i);
      continue;
    }
    bool inside = true;
    const std::size_t n = c.vertices.size();
    for (std::size_t k = 0; k < n && inside; ++k) {
      const Point e = c.vertices[(k + 1) % n] - c.vertices[k];
      if (cross(e, x - c.vertices[k]) < -tol * e.norm()) inside = false;
    }
    if (inside) return static_cast<int>(i);
  }
  // Points within tol of the domain but outside every cell because of
  // rounding: fall back to the argmax rule.
  int best = -1;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sites_.size(); ++i) {
    const double v = sites_[i].dot(x) - potential_[static_cast<Eigen::Index>(i)];
    if (v > best_value) {
      best_value = v;
      best = static_cast<int>(i);
    }
  }
  return best;
}

double LaguerreDiagram::slack(int i, int j, const Point& x) const {
  return (sites_[static_cast<std::size_t>(i)] - sites_[static_cast<std::size_t>(j)]).dot(x) - potential_[i] +
         potential_[j];
}

void LaguerreDiagram::dump(std::ostream& os, const SourceMeasure& source) const {
  fmt::print(os, "diagram dim={} sites={} facets={}\n", dim(), size(), facets_.size());
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    const Cell& c = cells_[i];
    fmt::print(os, "cell {} site=({:.17g}, {:.17g}) z={:.17g} empty={} mass={:.17g}\n", i, sites_[i].x(),
               sites_[i].y(), potential_[static_cast<Eigen::Index>(i)], c.empty ? 1 : 0,
               cell_mass(*this, source, i));
    for (std::size_t k = 0; k < c.vertices.size(); ++k)
      fmt::print(os, "  v {:.17g} {:.17g} next_label={}\n", c.vertices[k].x(), c.vertices[k].y(), c.labels[k]);
  }
  for (const Facet& f : facets_) {
    fmt::print(os, "facet {} {} integral={:.17g}", f.i, f.j, facet_integral(*this, source, f.i, f.j));
    for (const Point& v : f.vertices) fmt::print(os, " ({:.17g}, {:.17g})", v.x(), v.y());
    fmt::print(os, "\n");
  }
}

LaguerreDiagram build_diagram(const SourceMeasure& source, const DiscreteMeasure& target,
                              const PotentialVector& z) {
  return build_diagram(source, target, z.values());
}

LaguerreDiagram build_diagram(const SourceMeasure& source, const DiscreteMeasure& target,
                              const Vector& z) {
  if (static_cast<std::size_t>(z.size()) != target.size())
    throw ArgumentError(fmt::format("potential has length {} but the target has {} atoms", z.size(), target.size()));
  if (source.dim() != target.dim())
    throw ArgumentError("source and target dimensions differ");
  const std::size_t n = target.size();
  const auto& y = target.points();
  const Domain& dom = source.domain();
  std::vector<Cell> cells(n);
  std::vector<Facet> facets;
  std::vector<std::string> warnings;
  const double scale = std::max(1.0, dom.diameter());

  if (source.dim() == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      double lo = dom.lo(), hi = dom.hi();
      int lo_label = -1, hi_label = -1;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const double d = y[i].x() - y[j].x();
        const double bound = (z[static_cast<Eigen::Index>(i)] - z[static_cast<Eigen::Index>(j)]) / d;
        if (d > 0.0 && bound > lo) {
          lo = bound;
          lo_label = static_cast<int>(j);
        } else if (d < 0.0 && bound < hi) {
          hi = bound;
          hi_label = static_cast<int>(j);
        }
      }
      Cell& c = cells[i];
      c.empty = !(hi - lo > kMinArea);
      if (c.empty && hi > lo)
        warnings.push_back(fmt::format("cell {} has length {:.3g} < 1e-14 and is treated as empty", i, hi - lo));
      if (!c.empty) {
        c.vertices = {Point(lo, 0.0), Point(hi, 0.0)};
        c.labels = {lo_label, hi_label};
      }
    }
    const double tol = kVertexTol * scale;
    for (std::size_t i = 0; i < n; ++i) {
      if (cells[i].empty) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (cells[j].empty) continue;
        const double t = (z[static_cast<Eigen::Index>(i)] - z[static_cast<Eigen::Index>(j)]) / (y[i].x() - y[j].x());
        const auto touches = [&](const Cell& c) {
          return std::abs(c.vertices[0].x() - t) <= tol || std::abs(c.vertices[1].x() - t) <= tol;
        };
        if (touches(cells[i]) && touches(cells[j])) {
          const Point d = y[i] - y[j];
          facets.push_back({static_cast<int>(i), static_cast<int>(j), {Point(t, 0.0)}, d / d.squaredNorm()});
        }
      }
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      ClipPolygon poly{dom.vertices(), std::vector<int>(dom.vertices().size(), -1)};
      for (std::size_t j = 0; j < n && !poly.v.empty(); ++j) {
        if (j == i) continue;
        poly = clip(poly, y[i] - y[j], z[static_cast<Eigen::Index>(i)] - z[static_cast<Eigen::Index>(j)],
                    static_cast<int>(j));
      }
      drop_duplicate_vertices(poly, kVertexTol * scale);
      Cell& c = cells[i];
      const double area = poly.v.size() >= 3 ? polygon_area(poly.v) : 0.0;
      c.empty = !(area >= kMinArea);
      if (c.empty && !poly.v.empty())
        warnings.push_back(fmt::format("cell {} has area {:.3g} < 1e-14 and is treated as empty", i, area));
      if (!c.empty) {
        c.vertices = std::move(poly.v);
        c.labels = std::move(poly.label);
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      const Cell& c = cells[i];
      if (c.empty) continue;
      const std::size_t m = c.vertices.size();
      for (std::size_t k = 0; k < m; ++k) {
        const int j = c.labels[k];
        if (j <= static_cast<int>(i) || cells[static_cast<std::size_t>(j)].empty) continue;
        const Point& p = c.vertices[k];
        const Point& q = c.vertices[(k + 1) % m];
        if ((q - p).norm() <= kVertexTol * scale) continue;
        const Point d = y[i] - y[static_cast<std::size_t>(j)];
        facets.push_back({static_cast<int>(i), j, {p, q}, d / d.squaredNorm()});
      }
    }
  }
  return LaguerreDiagram(dom, y, z, std::move(cells), std::move(facets), std::move(warnings));
}

double cell_integral(const LaguerreDiagram& diag, const SourceMeasure& source, std::size_t i,
                     const ScalarField& f) {
  const Cell& c = diag.cell(i);
  if (c.empty) return 0.0;
  if (diag.dim() == 1) return integrate_nodes(source.interval_nodes(c.vertices[0].x(), c.vertices[1].x()), f);
  return integrate_nodes(source.polygon_nodes(c.vertices), f);
}

double cell_mass(const LaguerreDiagram& diag, const SourceMeasure& source, std::size_t i) {
  if (i >= diag.size()) throw ArgumentError("cell index out of range");
  const Cell& c = diag.cell(i);
  if (c.empty) return 0.0;
  const auto nodes = diag.dim() == 1 ? source.interval_nodes(c.vertices[0].x(), c.vertices[1].x())
                                     : source.polygon_nodes(c.vertices);
  double m = 0.0;
  for (const auto& n : nodes) m += n.weight;
  return m;
}

Vector cell_masses(const LaguerreDiagram& diag, const SourceMeasure& source) {
  Vector m(static_cast<Eigen::Index>(diag.size()));
  for (std::size_t i = 0; i < diag.size(); ++i) m[static_cast<Eigen::Index>(i)] = cell_mass(diag, source, i);
  return m;
}

double facet_integral(const LaguerreDiagram& diag, const SourceMeasure& source, int i, int j) {
  return facet_integral_impl(diag, source, i, j, nullptr);
}

double facet_integral(const LaguerreDiagram& diag, const SourceMeasure& source, int i, int j,
                      const VectorField& phi) {
  return facet_integral_impl(diag, source, i, j, &phi);
}

double level_set_integral(const LaguerreDiagram& diag, const SourceMeasure& source, int i, int j, double t) {
  return level_set_impl(diag, source, i, j, t, nullptr);
}

double level_set_integral(const LaguerreDiagram& diag, const SourceMeasure& source, int i, int j, double t,
                          const VectorField& phi) {
  return level_set_impl(diag, source, i, j, t, &phi);
}

Matrix mass_jacobian(const LaguerreDiagram& diag, const SourceMeasure& source) {
  const auto n = static_cast<Eigen::Index>(diag.size());
  Matrix jac = Matrix::Zero(n, n);
  for (const Facet& f : diag.facets()) {
    const double dist = (diag.sites()[static_cast<std::size_t>(f.i)] - diag.sites()[static_cast<std::size_t>(f.j)]).norm();
    const double v = facet_integral(diag, source, f.i, f.j) / dist;
    jac(f.i, f.j) += v;
    jac(f.j, f.i) += v;
    jac(f.i, f.i) -= v;
    jac(f.j, f.j) -= v;
  }
  return jac;
}

}  // namespace sdot
