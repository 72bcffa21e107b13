#pragma once

#include <optional>
#include <vector>

#include "sdot/types.hpp"

namespace sdot {

struct RateFit {
  std::vector<double> eps_grid;  // strictly decreasing
  std::vector<double> values;    // |functional| per eps
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<std::size_t> window;  // indices used by the fit
  std::optional<double> polylog_coef;  // coefficient of log log(1/eps) when requested
  std::vector<double> residuals;       // log-scale residuals on the window
  // Set when fewer than two points clear the noise floor: the secant slope
  // between the last resolved value (minus its error) and the next value
  // (plus its error), a lower bound on the true local slope.
  std::optional<double> slope_lower_bound;
};

struct FitRules {
  std::size_t drop_largest = 2;
  double floor_factor = 10.0;
  bool polylog = false;
};

// geometric(hi, lo, count): count points from hi down to lo.
std::vector<double> geometric_grid(double hi, double lo, std::size_t count);

// Least-squares fit of log|value| against log eps on the window that drops
// the `drop_largest` largest eps, points flagged invalid and values below
// floor_factor times their noise floor.
RateFit fit_rate(const std::vector<double>& eps_grid, const std::vector<double>& values,
                 const std::vector<double>& noise_floor, const std::vector<bool>& valid, const FitRules& rules = {});

}  // namespace sdot
