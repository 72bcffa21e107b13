#include "sdot/cell_quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sdot {

namespace {

constexpr double kNoLayer = 0.0;

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

double distance_to_line(const Point& x, const Point& p, const Point& q) {
  const Point e = q - p;
  return std::abs(cross(e, x - p)) / e.norm();
}

GradingOptions grading_for(const GradedOptions& opts, double eps, double scale_a, double scale_b,
                           int fine_levels, int base_panels) {
  GradingOptions g;
  g.panel = opts.panel;
  g.collar = opts.collar;
  for (double s : {scale_a, scale_b})
    if (s > 0.0 && std::isfinite(s)) g.collar = std::max(g.collar, opts.collar * eps / s);
  g.fine_levels = fine_levels;
  g.base_panels = base_panels;
  return g;
}

void nodes_1d(const LaguerreDiagram& diag, const SourceMeasure& source, const GradedOptions& opts,
              std::size_t i, std::vector<CellNode>& out) {
  const Cell& c = diag.cell(i);
  const double a = c.vertices[0].x(), b = c.vertices[1].x();
  const int ii = static_cast<int>(i);
  const double la = c.labels[0] >= 0 ? layer_length(diag, ii, c.labels[0], opts.eps) : kNoLayer;
  const double lb = c.labels[1] >= 0 ? layer_length(diag, ii, c.labels[1], opts.eps) : kNoLayer;
  const double len = b - a;
  // Scales are expressed in the same units as the interval.
  const GradingOptions g = grading_for(opts, opts.eps, la, lb, opts.fine_levels_1d, opts.base_panels_1d);
  std::vector<double> cuts = graded_breakpoints(len, la, lb, g);
  for (double& t : cuts) t += a;
  for (double k : source.density().breakpoints())
    if (k > a && k < b) cuts.push_back(k);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const GaussRule& rule = gauss_legendre(opts.order_1d);
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double h = cuts[s + 1] - cuts[s];
    if (!(h > 0.0)) continue;
    const double mid = 0.5 * (cuts[s] + cuts[s + 1]);
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      const Point x(mid + 0.5 * h * rule.nodes[k], 0.0);
      out.push_back({x, 0.5 * h * rule.weights[k] * source.density_at(x), ii});
    }
  }
}

void nodes_2d(const LaguerreDiagram& diag, const SourceMeasure& source, const GradedOptions& opts,
              std::size_t i, std::vector<CellNode>& out) {
  const Cell& cell = diag.cell(i);
  const auto& v = cell.vertices;
  const std::size_t m = v.size();
  const int ii = static_cast<int>(i);
  const Point c = polygon_centroid(v);

  std::vector<double> layer(m, kNoLayer);
  for (std::size_t k = 0; k < m; ++k)
    if (cell.labels[k] >= 0) layer[k] = layer_length(diag, ii, cell.labels[k], opts.eps);
  const auto layered = [](double s) { return s > 0.0 && std::isfinite(s); };
  const auto min_scale = [&](std::initializer_list<double> xs) {
    double best = std::numeric_limits<double>::infinity();
    for (double x : xs)
      if (layered(x)) best = std::min(best, x);
    return std::isfinite(best) ? best : kNoLayer;
  };

  const GaussRule& rule = gauss_legendre(opts.order_2d);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t prev = (k + m - 1) % m, next = (k + 1) % m;
    const Point& p = v[k];
    const Point& q = v[next];
    const Point e = q - p;
    const double elen = e.norm();
    const double twice_area = std::abs(cross(e, c - p));
    if (!(elen > 0.0) || !(twice_area > 0.0)) continue;
    const double h = twice_area / elen;

    // Normalized distance from the edge (tau) and position along it (sigma).
    const auto ratio = [&](double l, double d) { return layered(l) && d > 0.0 ? l / d : kNoLayer; };
    const double tau_scale = min_scale({ratio(layer[k], h), ratio(layer[prev], distance_to_line(c, v[prev], p)),
                                        ratio(layer[next], distance_to_line(c, q, v[(next + 1) % m]))});
    const auto sin_angle = [](const Point& a, const Point& b) {
      return std::abs(cross(a, b)) / (a.norm() * b.norm());
    };
    const double sin_p = sin_angle(p - v[prev], e);
    const double sin_q = sin_angle(e, v[(next + 1) % m] - q);
    const double sigma_left = sin_p > 0.0 ? ratio(layer[prev], elen * sin_p) : kNoLayer;
    const double sigma_right = sin_q > 0.0 ? ratio(layer[next], elen * sin_q) : kNoLayer;

    const auto tau_cuts =
        graded_breakpoints(1.0, tau_scale, kNoLayer,
                           grading_for(opts, opts.eps / h, tau_scale, kNoLayer, 0, opts.base_panels_2d));
    const auto sigma_cuts =
        graded_breakpoints(1.0, sigma_left, sigma_right,
                           grading_for(opts, opts.eps / elen, sigma_left, sigma_right, 0, opts.base_panels_2d));

    for (std::size_t a = 0; a + 1 < tau_cuts.size(); ++a) {
      const double t0 = tau_cuts[a], t1 = tau_cuts[a + 1];
      for (std::size_t ti = 0; ti < rule.nodes.size(); ++ti) {
        const double t = t0 + 0.5 * (t1 - t0) * (rule.nodes[ti] + 1.0);
        const double wt = 0.5 * (t1 - t0) * rule.weights[ti];
        for (std::size_t b = 0; b + 1 < sigma_cuts.size(); ++b) {
          const double s0 = sigma_cuts[b], s1 = sigma_cuts[b + 1];
          for (std::size_t si = 0; si < rule.nodes.size(); ++si) {
            const double s = s0 + 0.5 * (s1 - s0) * (rule.nodes[si] + 1.0);
            const double ws = 0.5 * (s1 - s0) * rule.weights[si];
            const Point x = (1.0 - t) * (p + s * e) + t * c;
            out.push_back({x, ws * wt * (1.0 - t) * twice_area * source.density_at(x), ii});
          }
        }
      }
    }
  }
}

}  // namespace

double layer_length(const LaguerreDiagram& diag, int i, int j, double eps) {
  if (!(eps > 0.0)) return kNoLayer;
  const double d = (diag.sites()[static_cast<std::size_t>(i)] - diag.sites()[static_cast<std::size_t>(j)]).norm();
  return eps / (kLogitScale * d);
}

std::vector<CellNode> graded_cell_nodes(const LaguerreDiagram& diag, const SourceMeasure& source,
                                        const GradedOptions& opts) {
  std::vector<CellNode> out;
  for (std::size_t i = 0; i < diag.size(); ++i) {
    if (diag.cell(i).empty) continue;
    if (diag.dim() == 1)
      nodes_1d(diag, source, opts, i, out);
    else
      nodes_2d(diag, source, opts, i, out);
  }
  return out;
}

}  // namespace sdot
