#pragma once

#include <string>
#include <vector>

#include "sdot/config.hpp"
#include "sdot/measures.hpp"

namespace sdot::testing {

inline SourceMeasure uniform_interval(double lo = -1.0, double hi = 1.0) {
  const double rho = 1.0 / (hi - lo);
  return SourceMeasure(Domain::interval(lo, hi), Density::uniform(), SourceBounds{rho, rho, std::nullopt});
}

inline SourceMeasure unit_square() {
  return SourceMeasure(Domain::polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}), Density::uniform(),
                       SourceBounds{1.0, 1.0, std::nullopt});
}

inline DiscreteMeasure two_atoms(double q1 = 0.5) {
  return DiscreteMeasure(1, {Point(-1, 0), Point(1, 0)}, (Vector(2) << q1, 1.0 - q1).finished(),
                         std::min(q1, 1.0 - q1) * (1.0 - 1e-12));
}

inline DiscreteMeasure split_sites() {
  return DiscreteMeasure(2, {Point(0.25, 0.5), Point(0.75, 0.5)}, Vector::Constant(2, 0.5), 0.5);
}

inline DiscreteMeasure square_sites() {
  return DiscreteMeasure(2, {Point(0.25, 0.25), Point(0.75, 0.25), Point(0.25, 0.75), Point(0.75, 0.75)},
                         Vector::Constant(4, 0.25), 0.25);
}

inline std::string config_path(const std::string& name) { return std::string(SDOT_CONFIG_DIR) + "/" + name + ".json"; }

inline ProblemConfig shipped(const std::string& name) { return build_problem(load_config_file(config_path(name))); }

inline const std::vector<std::string>& shipped_names() {
  static const std::vector<std::string> names{"symmetric-1d",      "asymmetric-1d",     "2d-square-2-sites",
                                              "2d-square-4-sites", "2d-random-4-sites", "2d-random-8-sites"};
  return names;
}

}  // namespace sdot::testing
