#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sdot/geometry.hpp"

namespace sdot {

// Outcome of a semidual solve (unregularized or entropic).
struct SolveReport {
  PotentialVector potential;
  double residual = 0.0;   // sup-norm of the optimality condition
  int iterations = 0;
  double objective = 0.0;
  bool converged = false;
  std::optional<double> epsilon;
  // Original target indices of the atoms that were solved for (zero-weight
  // atoms are dropped before solving).
  std::vector<std::size_t> kept_atoms;
  bool used_unregularized_warm_start = false;
  std::vector<double> objective_trace;  // objective at every accepted iterate
  std::vector<std::string> notes;
};

struct SemidualOptions {
  double tol = 0.0;  // 0 picks the default: 1e-10 in 1D, 1e-8 in 2D
  int max_iter = 100;
  std::optional<Vector> initial;
};

// Integral of max_i (<x, y_i> - z_i) dP + <z, q>.
double semidual_objective(const SourceMeasure& source, const DiscreteMeasure& target, const Vector& z);

// Damped Newton on the cell-mass equations P(C_i(z)) = q_i.
SolveReport solve_semidual(const SourceMeasure& source, const DiscreteMeasure& target,
                           const SemidualOptions& opts = {});

// Solves the bordered system [J 1; 1^T 0] [dz; mu] = [rhs; 0], i.e. J dz = rhs on 1-perp.
Vector solve_on_zero_sum(const Matrix& jac, const Vector& rhs);

// Potential whose Laguerre cells are the Voronoi cells of the sites shrunk
// into the domain; every cell is nonempty.
Vector contracted_voronoi_potential(const SourceMeasure& source, const DiscreteMeasure& target);

}  // namespace sdot
