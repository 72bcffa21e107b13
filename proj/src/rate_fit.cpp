#include "sdot/rate_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sdot {

std::vector<double> geometric_grid(double hi, double lo, std::size_t count) {
  if (count < 2 || !(hi > lo) || !(lo > 0.0)) throw ArgumentError("geometric grid needs hi > lo > 0 and two points");
  std::vector<double> out(count);
  const double step = std::log(lo / hi) / static_cast<double>(count - 1);
  for (std::size_t k = 0; k < count; ++k) out[k] = hi * std::exp(step * static_cast<double>(k));
  out.back() = lo;
  return out;
}

RateFit fit_rate(const std::vector<double>& eps_grid, const std::vector<double>& values,
                 const std::vector<double>& noise_floor, const std::vector<bool>& valid, const FitRules& rules) {
  const std::size_t n = eps_grid.size();
  if (values.size() != n || noise_floor.size() != n || valid.size() != n)
    throw ArgumentError("rate fit inputs differ in length");
  for (std::size_t k = 1; k < n; ++k)
    if (!(eps_grid[k] < eps_grid[k - 1])) throw ArgumentError("eps grid must be strictly decreasing");

  RateFit fit;
  fit.eps_grid = eps_grid;
  fit.values.resize(n);
  for (std::size_t k = 0; k < n; ++k) fit.values[k] = std::abs(values[k]);
  for (std::size_t k = rules.drop_largest; k < n; ++k) {
    const double v = fit.values[k];
    if (valid[k] && std::isfinite(v) && v > 0.0 && v >= rules.floor_factor * noise_floor[k]) fit.window.push_back(k);
  }

  const std::size_t cols = rules.polylog ? 3 : 2;
  if (fit.window.size() < cols) {
    // Secant bound from the last resolved point to the first unresolved one.
    std::optional<std::size_t> last;
    for (std::size_t k = rules.drop_largest; k < n; ++k)
      if (valid[k] && fit.values[k] >= rules.floor_factor * noise_floor[k] && fit.values[k] > 0.0) last = k;
    if (last && *last + 1 < n) {
      // Certified ends: the resolved value minus its error, the next value plus its error.
      const std::size_t k = *last;
      const double lower = fit.values[k] - noise_floor[k];
      const double upper = fit.values[k + 1] + noise_floor[k + 1];
      if (lower > 0.0 && upper > 0.0)
        fit.slope_lower_bound = std::log(lower / upper) / std::log(eps_grid[k] / eps_grid[k + 1]);
    }
    fit.slope = std::numeric_limits<double>::quiet_NaN();
    fit.intercept = std::numeric_limits<double>::quiet_NaN();
    fit.r_squared = std::numeric_limits<double>::quiet_NaN();
    return fit;
  }

  const auto m = static_cast<Eigen::Index>(fit.window.size());
  Matrix a(m, static_cast<Eigen::Index>(cols));
  Vector b(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    const std::size_t k = fit.window[static_cast<std::size_t>(r)];
    a(r, 0) = std::log(eps_grid[k]);
    a(r, 1) = 1.0;
    if (rules.polylog) a(r, 2) = std::log(std::log(1.0 / eps_grid[k]));
    b[r] = std::log(fit.values[k]);
  }
  const Vector coef = a.colPivHouseholderQr().solve(b);
  fit.slope = coef[0];
  fit.intercept = coef[1];
  if (rules.polylog) fit.polylog_coef = coef[2];
  const Vector res = b - a * coef;
  fit.residuals.assign(res.data(), res.data() + res.size());
  const double ss_tot = (b.array() - b.mean()).square().sum();
  fit.r_squared = ss_tot > 0.0 ? std::clamp(1.0 - res.squaredNorm() / ss_tot, 0.0, 1.0) : 1.0;
  return fit;
}

}  // namespace sdot
