#pragma once

#include <optional>

#include "sdot/cell_quadrature.hpp"
#include "sdot/sd_solver.hpp"

namespace sdot {

// G(eps, z), its z-Jacobian and the entropic semidual objective, all from
// one pass over a cell-aligned graded rule built on the diagram of z.
struct EntropicState {
  Vector G;
  Matrix jacobian;  // dG/dz, empty unless requested
  double objective = 0.0;
  std::size_t nodes = 0;
};

EntropicState evaluate_entropic(const SourceMeasure& source, const DiscreteMeasure& target, double eps,
                                const Vector& z, bool with_jacobian, const GradedOptions& quad = {});

// G_i = integral of softmax_i(2 (<x, y_j> - z_j) / eps) dP - q_i.
Vector eval_G(const SourceMeasure& source, const DiscreteMeasure& target, double eps, const Vector& z);

// Integral of (eps / 2) log sum_i exp(2 (<x, y_i> - z_i) / eps) dP + <z, q>.
double entropic_objective(const SourceMeasure& source, const DiscreteMeasure& target, double eps,
                          const Vector& z);

struct EntropicOptions {
  double tol = 0.0;  // 0 picks 1e-10 (1D) or 1e-8 (2D)
  int max_iter = 200;
  std::optional<Vector> warm_start;
  GradedOptions quadrature;
};

SolveReport solve_entropic(const SourceMeasure& source, const DiscreteMeasure& target, double eps,
                           const EntropicOptions& opts = {});

}  // namespace sdot
