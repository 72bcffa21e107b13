#include "sdot/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include <boost/math/special_functions/legendre.hpp>

namespace sdot {

namespace {

GaussRule make_gauss_rule(int order) {
  // Boost returns the nonnegative roots; mirror them and compute weights in
  // extended precision.
  const auto roots = boost::math::legendre_p_zeros<long double>(order);
  GaussRule rule;
  for (long double r : roots) {
    const long double dp = boost::math::legendre_p_prime<long double>(order, r);
    const long double w = 2.0L / ((1.0L - r * r) * dp * dp);
    rule.nodes.push_back(static_cast<double>(r));
    rule.weights.push_back(static_cast<double>(w));
    if (r != 0.0L) {
      rule.nodes.push_back(static_cast<double>(-r));
      rule.weights.push_back(static_cast<double>(w));
    }
  }
  std::vector<std::size_t> idx(rule.nodes.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return rule.nodes[a] < rule.nodes[b]; });
  GaussRule sorted;
  for (std::size_t i : idx) {
    sorted.nodes.push_back(rule.nodes[i]);
    sorted.weights.push_back(rule.weights[i]);
  }
  return sorted;
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
  if (order < 1 || order > 200) throw ArgumentError("Gauss-Legendre order must be in [1, 200]");
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, make_gauss_rule(order)).first;
  return it->second;
}

void append_interval_nodes(double a, double b, std::span<const double> breaks,
                           const QuadratureOptions& opts, std::vector<WeightedPoint>& out) {
  if (!(b > a)) return;
  std::vector<double> cuts{a};
  for (double t : breaks)
    if (t > a && t < b) cuts.push_back(t);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());

  const GaussRule& rule = gauss_legendre(opts.order_1d);
  const int panels = std::clamp(opts.panels_1d, 1, 256);
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double h = (cuts[s + 1] - cuts[s]) / panels;
    for (int p = 0; p < panels; ++p) {
      const double lo = cuts[s] + p * h;
      const double mid = lo + 0.5 * h;
      for (std::size_t k = 0; k < rule.nodes.size(); ++k)
        out.push_back({Point(mid + 0.5 * h * rule.nodes[k], 0.0), 0.5 * h * rule.weights[k]});
    }
  }
}

void append_triangle_nodes(const Point& a, const Point& b, const Point& c, int order,
                           int refine, std::vector<WeightedPoint>& out) {
  if (refine > 0) {
    const Point ab = 0.5 * (a + b), bc = 0.5 * (b + c), ca = 0.5 * (c + a);
    append_triangle_nodes(a, ab, ca, order, refine - 1, out);
    append_triangle_nodes(ab, b, bc, order, refine - 1, out);
    append_triangle_nodes(ca, bc, c, order, refine - 1, out);
    append_triangle_nodes(ab, bc, ca, order, refine - 1, out);
    return;
  }
  const double twice_area = std::abs((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
  if (twice_area == 0.0) return;
  const GaussRule& rule = gauss_legendre(order);
  // x = (1 - t) * ((1 - s) a + s b) + t c on the unit square, Jacobian (1 - t) * 2|T|.
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double t = 0.5 * (rule.nodes[i] + 1.0);
    const double wt = 0.5 * rule.weights[i];
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      const double s = 0.5 * (rule.nodes[j] + 1.0);
      const double ws = 0.5 * rule.weights[j];
      const Point x = (1.0 - t) * ((1.0 - s) * a + s * b) + t * c;
      out.push_back({x, ws * wt * (1.0 - t) * twice_area});
    }
  }
}

double polygon_area(std::span<const Point> polygon) {
  double twice = 0.0;
  const std::size_t n = polygon.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Point& p = polygon[k];
    const Point& q = polygon[(k + 1) % n];
    twice += p.x() * q.y() - p.y() * q.x();
  }
  return 0.5 * twice;
}

Point polygon_centroid(std::span<const Point> polygon) {
  Point c = Point::Zero();
  if (polygon.empty()) return c;
  for (const Point& p : polygon) c += p;
  return c / static_cast<double>(polygon.size());
}

void append_polygon_nodes(std::span<const Point> polygon, const QuadratureOptions& opts,
                          std::vector<WeightedPoint>& out) {
  if (polygon.size() < 3) return;
  const Point c = polygon_centroid(polygon);
  for (std::size_t k = 0; k < polygon.size(); ++k)
    append_triangle_nodes(polygon[k], polygon[(k + 1) % polygon.size()], c, opts.order_2d,
                          opts.refine_2d, out);
}

std::vector<double> graded_breakpoints(double length, double left_scale, double right_scale,
                                       const GradingOptions& opts) {
  std::vector<double> pts;
  if (!(length > 0.0)) return {0.0};
  const auto layered = [](double s) { return s > 0.0 && std::isfinite(s); };
  const auto grade = [&](double s, auto&& emit) {
    const double first = opts.panel * s;
    for (int k = opts.fine_levels; k >= 1; --k) emit(first * std::ldexp(1.0, -k));
    double t = first;
    for (; t <= opts.collar * s && t < length; t += first) emit(t);
    for (; t < length; t *= opts.growth) emit(t);
  };
  if (layered(left_scale)) grade(left_scale, [&](double t) { pts.push_back(t); });
  if (layered(right_scale)) grade(right_scale, [&](double t) { pts.push_back(length - t); });
  const int base = std::max(1, opts.base_panels);
  for (int k = 1; k < base; ++k) pts.push_back(length * k / base);

  std::vector<double> out{0.0};
  std::sort(pts.begin(), pts.end());
  const double tiny = 1e-14 * length;
  for (double t : pts)
    if (t > tiny && t < length - tiny && t - out.back() > tiny) out.push_back(t);
  out.push_back(length);
  return out;
}

}  // namespace sdot
