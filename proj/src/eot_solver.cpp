#include "sdot/eot_solver.hpp"

#include <cmath>
#include <vector>

#include <fmt/format.h>

namespace sdot {

EntropicState evaluate_entropic(const SourceMeasure& source, const DiscreteMeasure& target, double eps,
                                const Vector& z, bool with_jacobian, const GradedOptions& quad) {
  if (!(eps > 0.0)) throw ArgumentError("eps must be positive");
  const auto n = static_cast<Eigen::Index>(target.size());
  if (z.size() != n) throw ArgumentError("potential length does not match the target");

  GradedOptions q = quad;
  q.eps = eps;
  const LaguerreDiagram diag = build_diagram(source, target, z);
  const std::vector<CellNode> nodes = graded_cell_nodes(diag, source, q);

  const double inv_temp = kLogitScale / eps;
  // Long double accumulators keep G resolvable well below 1e-15.
  std::vector<long double> mass(static_cast<std::size_t>(n), 0.0L);
  Matrix second = with_jacobian ? Matrix::Zero(n, n) : Matrix();
  long double lse_integral = 0.0L;
  Vector logits(n), w(n);
  for (const CellNode& node : nodes) {
    // Log-sum-exp with the per-node maximum subtracted.
    for (Eigen::Index i = 0; i < n; ++i)
      logits[i] = inv_temp * (target.point(static_cast<std::size_t>(i)).dot(node.x) - z[i]);
    const double top = logits.maxCoeff();
    w = (logits.array() - top).exp();
    const double total = w.sum();
    w /= total;
    lse_integral += static_cast<long double>(node.weight) * (top + std::log(total));
    for (Eigen::Index i = 0; i < n; ++i)
      mass[static_cast<std::size_t>(i)] += static_cast<long double>(node.weight) * w[i];
    if (with_jacobian) second.selfadjointView<Eigen::Lower>().rankUpdate(w, node.weight);
  }

  EntropicState state;
  state.nodes = nodes.size();
  state.G.resize(n);
  Vector mass_d(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const long double m = mass[static_cast<std::size_t>(i)];
    state.G[i] = static_cast<double>(m - static_cast<long double>(target.weights()[i]));
    mass_d[i] = static_cast<double>(m);
  }
  state.objective = static_cast<double>(lse_integral / inv_temp) + z.dot(target.weights());
  if (with_jacobian) {
    Matrix cov = second.selfadjointView<Eigen::Lower>();
    cov.diagonal() -= mass_d;
    state.jacobian = inv_temp * cov;  // -(2 / eps) (diag(mass) - E[w w^T])
  }
  return state;
}

Vector eval_G(const SourceMeasure& source, const DiscreteMeasure& target, double eps, const Vector& z) {
  return evaluate_entropic(source, target, eps, z, false).G;
}

double entropic_objective(const SourceMeasure& source, const DiscreteMeasure& target, double eps,
                          const Vector& z) {
  return evaluate_entropic(source, target, eps, z, false).objective;
}

SolveReport solve_entropic(const SourceMeasure& source, const DiscreteMeasure& target, double eps,
                           const EntropicOptions& opts) {
  if (!(eps > 0.0)) throw ArgumentError("eps must be positive");
  if (target.has_zero_atoms()) {
    std::vector<std::size_t> kept;
    const DiscreteMeasure reduced = target.without_zero_atoms(kept);
    EntropicOptions sub = opts;
    if (sub.warm_start) {
      Vector init(static_cast<Eigen::Index>(kept.size()));
      for (std::size_t k = 0; k < kept.size(); ++k)
        init[static_cast<Eigen::Index>(k)] = (*opts.warm_start)[static_cast<Eigen::Index>(kept[k])];
      sub.warm_start = init;
    }
    SolveReport report = solve_entropic(source, reduced, eps, sub);
    report.kept_atoms = kept;
    report.notes.push_back(fmt::format("dropped {} zero-weight atoms before solving", target.size() - kept.size()));
    return report;
  }

  const double tol = opts.tol > 0.0 ? opts.tol : (source.dim() == 1 ? 1e-10 : 1e-8);
  const auto n = static_cast<Eigen::Index>(target.size());
  SolveReport report;
  report.epsilon = eps;
  for (std::size_t i = 0; i < target.size(); ++i) report.kept_atoms.push_back(i);

  Vector z = opts.warm_start ? Vector(*opts.warm_start) : Vector::Zero(n);
  if (z.size() != n) throw ArgumentError("warm start has the wrong length");
  z.array() -= z.mean();

  const auto fall_back = [&]() -> bool {
    if (report.used_unregularized_warm_start) return false;
    const SolveReport base = solve_semidual(source, target);
    report.used_unregularized_warm_start = true;
    report.notes.push_back("entropic Newton stalled; restarted from the unregularized potential");
    z = base.potential.values();
    return true;
  };

  EntropicState state = evaluate_entropic(source, target, eps, z, true, opts.quadrature);
  report.objective_trace.push_back(state.objective);
  for (int it = 0;; ++it) {
    report.residual = state.G.cwiseAbs().maxCoeff();
    report.iterations = it;
    if (report.residual <= tol) {
      report.converged = true;
      break;
    }
    if (it >= opts.max_iter) break;

    const Vector step = solve_on_zero_sum(state.jacobian, -state.G);
    bool accepted = false;
    if (step.allFinite()) {
      double t = 1.0;
      for (int halving = 0; halving < 40; ++halving, t *= 0.5) {
        const Vector trial = z + t * step;
        EntropicState next = evaluate_entropic(source, target, eps, trial, true, opts.quadrature);
        if (next.G.cwiseAbs().maxCoeff() < report.residual) {
          z = trial;
          state = std::move(next);
          accepted = true;
          break;
        }
      }
    }
    if (!accepted) {
      // Near round-off a restart cannot help.
      if (step.allFinite() && report.residual < 1e-9) {
        report.notes.push_back(fmt::format("stalled at residual {:.3e}", report.residual));
        break;
      }
      if (!fall_back()) {
        report.notes.push_back("backtracking on |G| failed");
        break;
      }
      state = evaluate_entropic(source, target, eps, z, true, opts.quadrature);
    }
    report.objective_trace.push_back(state.objective);
  }
  report.potential = PotentialVector(z, eps);
  report.objective = state.objective;
  return report;
}

}  // namespace sdot
