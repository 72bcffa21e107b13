#include "sdot/sd_solver.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace sdot {

double semidual_objective(const SourceMeasure& source, const DiscreteMeasure& target, const Vector& z) {
  const LaguerreDiagram diag = build_diagram(source, target, z);
  double value = z.dot(target.weights());
  for (std::size_t i = 0; i < diag.size(); ++i) {
    const Point y = target.point(i);
    const double zi = z[static_cast<Eigen::Index>(i)];
    value += cell_integral(diag, source, i, [&](const Point& x) { return y.dot(x) - zi; });
  }
  return value;
}

Vector solve_on_zero_sum(const Matrix& jac, const Vector& rhs) {
  const Eigen::Index n = jac.rows();
  Matrix bordered = Matrix::Zero(n + 1, n + 1);
  bordered.topLeftCorner(n, n) = jac;
  bordered.block(0, n, n, 1).setOnes();
  bordered.block(n, 0, 1, n).setOnes();
  Vector b = Vector::Zero(n + 1);
  b.head(n) = rhs;
  const Vector sol = bordered.fullPivLu().solve(b);
  return sol.head(n);
}

Vector contracted_voronoi_potential(const SourceMeasure& source, const DiscreteMeasure& target) {
  const auto n = static_cast<Eigen::Index>(target.size());
  Vector z = Vector::Zero(n);
  const Point ybar = target.mean();
  double spread = 0.0;
  for (const Point& y : target.points()) spread = std::max(spread, (y - ybar).norm());
  if (spread == 0.0) return z;
  const Point c = source.domain().centroid();
  const double s = 0.5 * source.domain().inradius_about_centroid() / spread;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Point& y = target.point(static_cast<std::size_t>(i));
    z[i] = (c - s * ybar).dot(y) + 0.5 * s * y.squaredNorm();
  }
  return z.array() - z.mean();
}

SolveReport solve_semidual(const SourceMeasure& source, const DiscreteMeasure& target,
                           const SemidualOptions& opts) {
  if (target.has_zero_atoms()) {
    std::vector<std::size_t> kept;
    const DiscreteMeasure reduced = target.without_zero_atoms(kept);
    SemidualOptions sub = opts;
    if (sub.initial) {
      Vector init(static_cast<Eigen::Index>(kept.size()));
      for (std::size_t k = 0; k < kept.size(); ++k)
        init[static_cast<Eigen::Index>(k)] = (*opts.initial)[static_cast<Eigen::Index>(kept[k])];
      sub.initial = init;
    }
    SolveReport report = solve_semidual(source, reduced, sub);
    report.kept_atoms = kept;
    report.notes.push_back(fmt::format("dropped {} zero-weight atoms before solving",
                                       target.size() - kept.size()));
    return report;
  }

  const double tol = opts.tol > 0.0 ? opts.tol : (source.dim() == 1 ? 1e-10 : 1e-8);
  const auto n = static_cast<Eigen::Index>(target.size());
  const Vector& q = target.weights();

  SolveReport report;
  for (std::size_t i = 0; i < target.size(); ++i) report.kept_atoms.push_back(i);

  Vector z = opts.initial ? Vector(*opts.initial) : Vector::Zero(n);
  if (z.size() != n) throw ArgumentError("initial potential has the wrong length");
  z.array() -= z.mean();

  Vector mass = cell_masses(build_diagram(source, target, z), source);
  if (mass.minCoeff() <= 0.0) {
    z = contracted_voronoi_potential(source, target);
    mass = cell_masses(build_diagram(source, target, z), source);
    report.notes.push_back("initial potential had empty cells; restarted from contracted Voronoi potential");
  }
  const double floor = 0.5 * std::min(q.minCoeff(), mass.minCoeff());
  double objective = semidual_objective(source, target, z);
  report.objective_trace.push_back(objective);

  for (int it = 0;; ++it) {
    const Vector residual = mass - q;
    report.residual = residual.cwiseAbs().maxCoeff();
    report.iterations = it;
    if (report.residual <= tol) {
      report.converged = true;
      break;
    }
    if (it >= opts.max_iter) break;

    const LaguerreDiagram diag = build_diagram(source, target, z);
    const Vector step = solve_on_zero_sum(mass_jacobian(diag, source), -residual);
    if (!step.allFinite()) {
      report.notes.push_back("Newton system was singular");
      break;
    }
    double t = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 40; ++halving, t *= 0.5) {
      const Vector trial = z + t * step;
      const Vector trial_mass = cell_masses(build_diagram(source, target, trial), source);
      if (trial_mass.minCoeff() < floor) continue;
      const double trial_objective = semidual_objective(source, target, trial);
      if (trial_objective > objective + 1e-13 * (1.0 + std::abs(objective))) continue;
      z = trial;
      mass = trial_mass;
      objective = trial_objective;
      accepted = true;
      break;
    }
    if (!accepted) {
      report.notes.push_back("line search failed to find an admissible step");
      break;
    }
    report.objective_trace.push_back(objective);
  }
  report.potential = PotentialVector(z);
  report.objective = semidual_objective(source, target, report.potential.values());
  return report;
}

}  // namespace sdot
