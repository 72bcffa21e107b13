#include "sdot/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/zeta.hpp>
#include <fmt/format.h>

#include "sdot/maps.hpp"

namespace sdot {

namespace {

constexpr double kMachineEps = std::numeric_limits<double>::epsilon();

// Smallest nonzero |eigenvalue| of the mass Jacobian, i.e. its conditioning on 1-perp.
double jacobian_gap(const LaguerreDiagram& diag, const SourceMeasure& source) {
  if (diag.size() < 2) return 1.0;
  const Matrix jac = mass_jacobian(diag, source);
  Eigen::SelfAdjointEigenSolver<Matrix> es(jac);
  Vector ev = es.eigenvalues().cwiseAbs();
  std::sort(ev.data(), ev.data() + ev.size());
  return std::max(ev[1], std::numeric_limits<double>::min());
}

double field_scale(const std::vector<TestField>& fields) {
  double s = 1.0;
  for (const TestField& f : fields) s = std::max(s, f.holder_bound);
  return s;
}

}  // namespace

FunctionalKind parse_functional_kind(const std::string& name) {
  if (name == "pairing") return FunctionalKind::kPairing;
  if (name == "l2") return FunctionalKind::kL2;
  if (name == "dual_norm") return FunctionalKind::kDualNorm;
  if (name == "potential_gap") return FunctionalKind::kPotentialGap;
  throw ValidationError({fmt::format("functional '{}' is not one of pairing, l2, dual_norm, potential_gap", name)});
}

std::string functional_name(FunctionalKind kind) {
  switch (kind) {
    case FunctionalKind::kPairing: return "pairing";
    case FunctionalKind::kL2: return "l2";
    case FunctionalKind::kDualNorm: return "dual_norm";
    case FunctionalKind::kPotentialGap: return "potential_gap";
  }
  return "unknown";
}

SweepResult rate_sweep(const SourceMeasure& source, const DiscreteMeasure& target, const std::vector<double>& eps_grid,
                       const SweepOptions& opts) {
  if (eps_grid.size() < 6) throw ArgumentError("eps grid needs at least 6 points");
  for (std::size_t k = 0; k < eps_grid.size(); ++k) {
    if (!(eps_grid[k] > 0.0 && eps_grid[k] < 1.0)) throw ArgumentError("eps grid must lie in (0, 1)");
    if (k > 0 && !(eps_grid[k] < eps_grid[k - 1])) throw ArgumentError("eps grid must be strictly decreasing");
  }
  if ((opts.kind == FunctionalKind::kPairing || opts.kind == FunctionalKind::kDualNorm) && opts.fields.empty())
    throw ArgumentError("pairing sweeps need at least one test field");

  SemidualOptions sd;
  sd.tol = opts.semidual_tol;
  const SolveReport base = solve_semidual(source, target, sd);
  if (base.kept_atoms.size() != target.size()) throw ArgumentError("rate sweeps need a target without zero atoms");
  const Vector z0 = base.potential.values();
  const LaguerreDiagram diag0 = build_diagram(source, target, z0);
  const double lambda = jacobian_gap(diag0, source);
  const double diam_y = std::max(target.support_diameter(), 1e-300);
  const double scale = field_scale(opts.fields) * diam_y *
                       (1.0 + source.density_max() * std::pow(source.domain().diameter(), source.dim() - 1));

  SweepResult result;
  result.kind = opts.kind;
  result.z0 = z0;
  EntropicOptions eo;
  eo.tol = opts.entropic_tol > 0.0 ? opts.entropic_tol : (source.dim() == 1 ? 1e-15 : 1e-12);
  eo.max_iter = 60;
  Vector warm = z0;
  for (double eps : eps_grid) {
    SweepPoint pt;
    pt.eps = eps;
    try {
      eo.warm_start = warm;
      const SolveReport rep = solve_entropic(source, target, eps, eo);
      pt.iterations = rep.iterations;
      pt.residual = rep.residual;
      const Vector& z = rep.potential.values();
      pt.valid = rep.converged || rep.residual <= 1e-10;
      if (!pt.valid) pt.note = fmt::format("entropic solve stopped at residual {:.3e}", rep.residual);
      if (z.allFinite()) warm = z;
      const double drift = rep.residual / lambda;
      switch (opts.kind) {
        case FunctionalKind::kPairing:
          pt.value = pair_maps(std::span(opts.fields.data(), 1), diag0.sites(), z, eps, diag0, source)[0];
          pt.noise_floor = (drift + 1e-15) * scale;
          break;
        case FunctionalKind::kDualNorm:
          pt.value = pair_maps(opts.fields, diag0.sites(), z, eps, diag0, source).cwiseAbs().maxCoeff();
          pt.noise_floor = (drift + 1e-15) * scale;
          break;
        case FunctionalKind::kL2:
          pt.value = l2_sq_maps(diag0.sites(), z, eps, diag0, source);
          pt.noise_floor = (drift + 1e-15) * diam_y * scale;
          break;
        case FunctionalKind::kPotentialGap:
          pt.value = (z - z0).cwiseAbs().maxCoeff();
          pt.noise_floor = (rep.residual + base.residual) / lambda + 8.0 * kMachineEps * (1.0 + z0.cwiseAbs().maxCoeff());
          break;
      }
      if (!std::isfinite(pt.value)) {
        pt.valid = false;
        pt.note = "functional is not finite";
      }
    } catch (const Error& e) {
      pt.valid = false;
      pt.note = e.what();
    }
    result.points.push_back(pt);
  }

  std::vector<double> values, floors;
  std::vector<bool> valid;
  for (const SweepPoint& p : result.points) {
    values.push_back(p.value);
    floors.push_back(p.noise_floor);
    valid.push_back(p.valid);
  }
  result.fit = fit_rate(eps_grid, values, floors, valid, opts.rules);
  if (!result.fit.slope_lower_bound && result.fit.window.size() < 2 && opts.rules.drop_largest > 0) {
    // Everything past the dropped points sits below the floor; the secant
    // bound then starts from the largest resolved eps.
    FitRules all = opts.rules;
    all.drop_largest = 0;
    const RateFit bound = fit_rate(eps_grid, values, floors, valid, all);
    result.fit.slope_lower_bound = bound.slope_lower_bound;
  }
  return result;
}

ConstantCheck constant_check(const SourceMeasure& source, const DiscreteMeasure& target, double eps_small) {
  if (!(eps_small > 0.0 && eps_small <= 1e-2)) throw ArgumentError("constant check needs 0 < eps <= 1e-2");
  ConstantCheck out;
  out.eps = eps_small;
  SemidualOptions sd;
  sd.tol = 1e-14;
  const SolveReport base = solve_semidual(source, target, sd);
  if (base.kept_atoms.size() != target.size()) throw ArgumentError("constant check needs a target without zero atoms");
  const LaguerreDiagram diag0 = build_diagram(source, target, base.potential);
  if (target.size() < 2) return out;

  for (const Facet& f : diag0.facets()) {
    const double dist = (target.point(static_cast<std::size_t>(f.i)) - target.point(static_cast<std::size_t>(f.j))).norm();
    out.predicted += facet_integral(diag0, source, f.i, f.j) / dist;
  }
  out.predicted *= -std::numbers::pi * std::numbers::pi / 24.0;

  EntropicOptions eo;
  eo.tol = source.dim() == 1 ? 1e-15 : 1e-12;
  eo.warm_start = base.potential.values();
  const SolveReport rep = solve_entropic(source, target, eps_small, eo);
  const TestField id = identity_field(source.domain());
  out.measured = pair_difference(id, rep.potential, diag0, source) / (eps_small * eps_small);
  out.relative_gap = out.predicted != 0.0 ? std::abs(out.measured - out.predicted) / std::abs(out.predicted)
                                          : std::abs(out.measured);
  return out;
}

double oracle_tanh(double eps, OracleKind kind, double alpha) {
  if (!(eps > 0.0)) throw ArgumentError("eps must be positive");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ArgumentError("alpha must lie in [0, 1]");
  // Substituting x = eps u; tanh(2u) - 1 = -2 / (exp(4u) + 1) avoids cancellation.
  // Beyond u = 60 the integrand is below exp(-240) and is dropped.
  const double upper = std::min(1.0 / eps, 60.0);
  boost::math::quadrature::tanh_sinh<double> integrator;
  if (kind == OracleKind::kPower) {
    const auto f = [alpha](double u) { return -2.0 * std::pow(u, alpha) / (std::exp(4.0 * u) + 1.0); };
    return std::pow(eps, 1.0 + alpha) * integrator.integrate(f, 0.0, upper, 1e-14);
  }
  const auto f = [](double u) {
    const double d = 2.0 / (std::exp(4.0 * u) + 1.0);
    return d * d;
  };
  return eps * integrator.integrate(f, 0.0, upper, 1e-14);
}

double oracle_tanh_limit(OracleKind kind, double alpha) {
  boost::math::quadrature::exp_sinh<double> integrator;
  if (kind == OracleKind::kPower)
    return integrator.integrate([alpha](double u) { return -2.0 * std::pow(u, alpha) / (std::exp(4.0 * u) + 1.0); },
                                0.0, std::numeric_limits<double>::infinity(), 1e-14);
  return integrator.integrate(
      [](double u) {
        const double d = 2.0 / (std::exp(4.0 * u) + 1.0);
        return d * d;
      },
      0.0, std::numeric_limits<double>::infinity(), 1e-14);
}

double oracle_tanh_limit_closed(OracleKind kind, double alpha) {
  if (kind == OracleKind::kL2) return std::log(2.0) - 0.5;
  const double s = 1.0 + alpha;
  const double eta = alpha == 0.0 ? std::log(2.0) : (1.0 - std::pow(2.0, 1.0 - s)) * boost::math::zeta(s);
  return -2.0 * boost::math::tgamma(s) * eta / std::pow(4.0, s);
}

CltResult clt_sim(const SourceMeasure& source, const DiscreteMeasure& target, const TestField& phi,
                  const CltOptions& opts) {
  if (opts.n_list.empty() || opts.trials < 2) throw ArgumentError("clt needs sample sizes and at least two trials");
  CltResult result;
  // eps_n = n^-a is o(n^(-1 / (2 (1 + alpha))) and o(n^(-1/4) / log^(3/2) n) iff a exceeds both exponents.
  const double needed = std::max(1.0 / (2.0 * (1.0 + opts.alpha)), 0.25);
  if (!(opts.eps_exponent > needed))
    result.warnings.push_back(fmt::format("eps_n = n^-{} does not decay faster than n^-{}; the limit result does not apply",
                                          opts.eps_exponent, needed));

  SemidualOptions sd;
  sd.tol = 1e-13;
  const SolveReport base = solve_semidual(source, target, sd);
  const DiscreteMeasure* pop = &target;
  std::optional<DiscreteMeasure> reduced;
  if (base.kept_atoms.size() != target.size()) {
    std::vector<std::size_t> kept;
    reduced = target.without_zero_atoms(kept);
    pop = &*reduced;
  }
  const LaguerreDiagram diag0 = build_diagram(source, *pop, base.potential);

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = std::max(1u, std::min(opts.threads == 0 ? hw : opts.threads, static_cast<unsigned>(opts.trials)));

  for (std::size_t k = 0; k < opts.n_list.size(); ++k) {
    const std::size_t n = opts.n_list[k];
    if (n < 1) throw ArgumentError("sample sizes must be positive");
    CltStats st;
    st.n = n;
    st.eps = std::pow(static_cast<double>(n), -opts.eps_exponent);
    st.statistic.assign(opts.trials, 0.0);
    st.gap.assign(opts.trials, 0.0);
    std::vector<std::size_t> redraws(opts.trials, 0);
    const double root_n = std::sqrt(static_cast<double>(n));

    const auto run_trial = [&](std::size_t t) {
      for (std::uint64_t attempt = 0;; ++attempt) {
        const std::uint64_t seed = opts.seed + t + k * 1000003ULL + attempt * 0x9E3779B97F4A7C15ULL;
        try {
          std::vector<std::size_t> kept;
          const DiscreteMeasure sample = sample_discrete(*pop, n, seed).without_zero_atoms(kept);
          const SolveReport hat0 = solve_semidual(source, sample, sd);
          if (!hat0.converged) throw EvaluationError("unregularized solve did not converge");
          EntropicOptions eo;
          eo.tol = 1e-12;
          eo.warm_start = hat0.potential.values();
          const SolveReport hat = solve_entropic(source, sample, st.eps, eo);
          if (!hat.converged) throw EvaluationError("entropic solve did not converge");
          const LaguerreDiagram diag_hat = build_diagram(source, sample, hat0.potential);
          const Vector& z = hat.potential.values();
          st.statistic[t] = root_n * pair_maps(std::span(&phi, 1), sample.points(), z, st.eps, diag0, source)[0];
          st.gap[t] = root_n * pair_maps(std::span(&phi, 1), sample.points(), z, st.eps, diag_hat, source)[0];
          redraws[t] = attempt;
          return;
        } catch (const Error&) {
          if (attempt >= 20) throw;
        }
      }
    };

    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> failures(workers);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        try {
          for (std::size_t t = next++; t < opts.trials; t = next++) run_trial(t);
        } catch (...) {
          failures[w] = std::current_exception();
          next = opts.trials;
        }
      });
    for (auto& th : pool) th.join();
    for (auto& f : failures)
      if (f) std::rethrow_exception(f);

    const auto m = static_cast<double>(opts.trials);
    double mean = 0.0, gap_mean = 0.0;
    for (std::size_t t = 0; t < opts.trials; ++t) {
      mean += st.statistic[t];
      gap_mean += st.gap[t];
      st.resampled += redraws[t];
    }
    mean /= m;
    gap_mean /= m;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0, g2 = 0.0;
    for (std::size_t t = 0; t < opts.trials; ++t) {
      const double d = st.statistic[t] - mean;
      m2 += d * d;
      m3 += d * d * d;
      m4 += d * d * d * d;
      g2 += (st.gap[t] - gap_mean) * (st.gap[t] - gap_mean);
    }
    st.mean = mean;
    st.variance = m2 / (m - 1.0);
    st.std_error = std::sqrt(st.variance / m);
    const double pop_var = m2 / m;
    st.skewness = pop_var > 0.0 ? (m3 / m) / std::pow(pop_var, 1.5) : 0.0;
    st.excess_kurtosis = pop_var > 0.0 ? (m4 / m) / (pop_var * pop_var) - 3.0 : 0.0;
    st.gap_mean = gap_mean;
    st.gap_sd = std::sqrt(g2 / (m - 1.0));
    result.per_n.push_back(std::move(st));
  }
  return result;
}

}  // namespace sdot
