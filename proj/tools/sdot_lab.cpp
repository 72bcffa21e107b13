#include <chrono>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <boost/version.hpp>
#include <fmt/format.h>

#include "sdot/config.hpp"
#include "sdot/experiments.hpp"
#include "sdot/maps.hpp"
#include "sdot/report.hpp"

namespace {

using namespace sdot;

constexpr const char* kVersion = "0.1.0";

struct Output {
  Table table;
  Json summary = Json::object();
  std::string svg;
};

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Json point_json(const Point& p, int dim) { return dim == 1 ? Json(p.x()) : Json::array({p.x(), p.y()}); }

std::vector<std::string> row(std::initializer_list<double> xs) {
  std::vector<std::string> out;
  for (double x : xs) out.push_back(format_number(x));
  return out;
}

std::vector<double> eps_grid_of(const Json& cfg) {
  const double hi = setting(cfg, "experiment.eps_grid.hi", 0.1);
  const double lo = setting(cfg, "experiment.eps_grid.lo", 1e-4);
  const double count = setting(cfg, "experiment.eps_grid.count", 16.0);
  return geometric_grid(hi, lo, static_cast<std::size_t>(count));
}

std::vector<TestField> fields_of(const Json& cfg, const ProblemConfig& p, std::uint64_t seed) {
  const std::string field = setting(cfg, "experiment.field", std::string("id"));
  const double alpha = setting(cfg, "experiment.alpha", 1.0);
  if (field == "id") return {identity_field(p.source.domain())};
  if (field == "power") {
    const Point c(setting(cfg, "experiment.center", 0.0), 0.0);
    return {power_field(p.source.domain(), alpha, c)};
  }
  if (field == "sign") return {sign_field(setting(cfg, "experiment.center", 0.0))};
  if (field == "family") {
    const auto count = static_cast<std::size_t>(setting(cfg, "experiment.family_count", 32.0));
    return make_test_family(alpha, count, seed, p.source.domain());
  }
  throw ValidationError({fmt::format("experiment.field '{}' is not one of id, power, sign, family", field)});
}

Output run_solve(const ProblemConfig& p) {
  const SolveReport rep = solve_semidual(p.source, p.target);
  const LaguerreDiagram diag = build_diagram(p.source, p.target, rep.potential);
  const Vector mass = cell_masses(diag, p.source);
  Output out;
  out.table.header = {"index", "y1", "y2", "q", "z", "mass"};
  for (std::size_t i = 0; i < p.target.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    out.table.rows.push_back(row({static_cast<double>(i), p.target.point(i).x(), p.target.point(i).y(),
                                  p.target.weight(i), rep.potential[i], mass[ii]}));
  }
  out.summary["z"] = to_json(rep.potential.values());
  out.summary["residual"] = rep.residual;
  out.summary["iterations"] = rep.iterations;
  out.summary["converged"] = rep.converged;
  out.summary["objective"] = rep.objective;
  out.summary["notes"] = rep.notes;
  out.svg = svg_diagram(diag);
  return out;
}

Output run_entropic(const ProblemConfig& p) {
  const double eps = setting(p.resolved, "experiment.eps", 0.01);
  const SolveReport base = solve_semidual(p.source, p.target);
  EntropicOptions eo;
  eo.warm_start = base.potential.values();
  const SolveReport rep = solve_entropic(p.source, p.target, eps, eo);
  Output out;
  out.table.header = {"index", "y1", "y2", "q", "z_eps", "z0"};
  for (std::size_t i = 0; i < rep.kept_atoms.size(); ++i) {
    const std::size_t k = rep.kept_atoms[i];
    out.table.rows.push_back(row({static_cast<double>(k), p.target.point(k).x(), p.target.point(k).y(),
                                  p.target.weight(k), rep.potential[i], base.potential[i]}));
  }
  out.summary["eps"] = eps;
  out.summary["z_eps"] = to_json(rep.potential.values());
  out.summary["z0"] = to_json(base.potential.values());
  out.summary["residual"] = rep.residual;
  out.summary["iterations"] = rep.iterations;
  out.summary["converged"] = rep.converged;
  out.summary["used_unregularized_warm_start"] = rep.used_unregularized_warm_start;
  out.summary["notes"] = rep.notes;
  out.svg = svg_diagram(build_diagram(p.source, p.target, base.potential));
  return out;
}

Output run_rates(const ProblemConfig& p, std::uint64_t seed) {
  SweepOptions so;
  so.kind = parse_functional_kind(setting(p.resolved, "experiment.functional", std::string("pairing")));
  if (so.kind == FunctionalKind::kPairing || so.kind == FunctionalKind::kDualNorm) so.fields = fields_of(p.resolved, p, seed);
  so.rules.polylog = setting(p.resolved, "experiment.polylog", false);
  const std::vector<double> grid = eps_grid_of(p.resolved);
  const SweepResult res = rate_sweep(p.source, p.target, grid, so);
  Output out;
  out.table.header = {"eps", "value", "noise_floor", "valid", "in_window", "iterations", "residual", "note"};
  for (std::size_t k = 0; k < res.points.size(); ++k) {
    const SweepPoint& pt = res.points[k];
    const bool in = std::find(res.fit.window.begin(), res.fit.window.end(), k) != res.fit.window.end();
    auto r = row({pt.eps, pt.value, pt.noise_floor, pt.valid ? 1.0 : 0.0, in ? 1.0 : 0.0,
                  static_cast<double>(pt.iterations), pt.residual});
    r.push_back(pt.note);
    out.table.rows.push_back(r);
  }
  out.summary["functional"] = functional_name(so.kind);
  out.summary["slope"] = std::isfinite(res.fit.slope) ? Json(res.fit.slope) : Json();
  out.summary["intercept"] = std::isfinite(res.fit.intercept) ? Json(res.fit.intercept) : Json();
  out.summary["r_squared"] = std::isfinite(res.fit.r_squared) ? Json(res.fit.r_squared) : Json();
  out.summary["window"] = res.fit.window;
  out.summary["residuals"] = res.fit.residuals;
  if (res.fit.polylog_coef) out.summary["polylog_coef"] = *res.fit.polylog_coef;
  if (res.fit.slope_lower_bound) out.summary["slope_lower_bound"] = *res.fit.slope_lower_bound;
  Json fams = Json::array();
  for (const TestField& f : so.fields) fams.push_back({{"label", f.label}, {"alpha", f.alpha}, {"holder_bound", f.holder_bound}, {"params", f.params}});
  out.summary["fields"] = fams;
  out.summary["z0"] = to_json(res.z0);
  std::vector<double> vals;
  for (const SweepPoint& pt : res.points) vals.push_back(pt.value);
  out.svg = svg_loglog(grid, vals, res.fit.slope, res.fit.intercept, fmt::format("{} vs eps", functional_name(so.kind)));
  return out;
}

Output run_constant(const ProblemConfig& p) {
  const double eps = setting(p.resolved, "experiment.eps_small", 1e-3);
  const ConstantCheck c = constant_check(p.source, p.target, eps);
  Output out;
  out.table.header = {"eps", "measured", "predicted", "relative_gap"};
  out.table.rows.push_back(row({c.eps, c.measured, c.predicted, c.relative_gap}));
  out.summary["eps"] = c.eps;
  out.summary["measured"] = c.measured;
  out.summary["predicted"] = c.predicted;
  out.summary["relative_gap"] = c.relative_gap;
  return out;
}

Output run_clt(const ProblemConfig& p, std::uint64_t seed, unsigned threads) {
  CltOptions co;
  std::vector<double> ns = setting_list(p.resolved, "experiment.clt.n", {100, 400, 1600});
  co.n_list.clear();
  for (double n : ns) co.n_list.push_back(static_cast<std::size_t>(n));
  co.trials = static_cast<std::size_t>(setting(p.resolved, "experiment.clt.trials", 500.0));
  co.eps_exponent = setting(p.resolved, "experiment.clt.eps_exponent", 0.3);
  co.alpha = setting(p.resolved, "experiment.alpha", 1.0);
  co.seed = seed;
  co.threads = threads;
  const auto fields = fields_of(p.resolved, p, seed);
  const CltResult res = clt_sim(p.source, p.target, fields.front(), co);
  Output out;
  out.table.header = {"n", "eps", "mean", "variance", "std_error", "skewness", "excess_kurtosis", "gap_mean", "gap_sd", "resampled"};
  Json per = Json::array();
  for (const CltStats& s : res.per_n) {
    out.table.rows.push_back(row({static_cast<double>(s.n), s.eps, s.mean, s.variance, s.std_error, s.skewness,
                                  s.excess_kurtosis, s.gap_mean, s.gap_sd, static_cast<double>(s.resampled)}));
    per.push_back({{"n", s.n}, {"eps", s.eps}, {"mean", s.mean}, {"variance", s.variance}, {"std_error", s.std_error},
                   {"skewness", s.skewness}, {"excess_kurtosis", s.excess_kurtosis}, {"gap_mean", s.gap_mean},
                   {"gap_sd", s.gap_sd}, {"resampled", s.resampled}});
  }
  out.summary["per_n"] = per;
  out.summary["warnings"] = res.warnings;
  out.summary["field"] = fields.front().label;
  return out;
}

Output run_oracle(const ProblemConfig& p) {
  const std::string kind_name = setting(p.resolved, "experiment.oracle", std::string("power"));
  if (kind_name != "power" && kind_name != "l2") throw ValidationError({"experiment.oracle must be power or l2"});
  const OracleKind kind = kind_name == "power" ? OracleKind::kPower : OracleKind::kL2;
  const double alpha = setting(p.resolved, "experiment.alpha", 1.0);
  const double order = kind == OracleKind::kPower ? 1.0 + alpha : 1.0;
  Output out;
  out.table.header = {"eps", "oracle", "scaled"};
  for (double eps : eps_grid_of(p.resolved)) {
    const double v = oracle_tanh(eps, kind, alpha);
    out.table.rows.push_back(row({eps, v, v / std::pow(eps, order)}));
  }
  out.summary["kind"] = kind_name;
  out.summary["alpha"] = alpha;
  out.summary["limit"] = oracle_tanh_limit(kind, alpha);
  out.summary["limit_closed_form"] = oracle_tanh_limit_closed(kind, alpha);
  return out;
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json error_record(const std::string& type, const std::string& message, const std::vector<std::string>& violations = {}) {
  Json e = {{"type", type}, {"message", message}};
  if (!violations.empty()) e["violations"] = violations;
  return Json{{"error", e}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semidiscrete entropic transport experiments"};
  std::string command, config_path, out_dir = "out";
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  bool svg = false;
  app.add_option("command", command, "solve | entropic | rates | constant | clt | oracle")
      ->required()
      ->check(CLI::IsMember({"solve", "entropic", "rates", "constant", "clt", "oracle"}));
  app.add_option("--config", config_path, "problem config (JSON)")->required();
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "random seed (overrides the config)");
  app.add_option("--threads", threads, "worker cap for parallel experiments (0: all cores)");
  app.add_option("--set", overrides, "override a config field, e.g. --set experiment.eps=0.05");
  app.add_flag("--svg", svg, "also write plot.svg");
  app.set_version_flag("--version", kVersion);
  CLI11_PARSE(app, argc, argv);

  try {
    Json cfg = load_config_file(config_path);
    for (const std::string& o : overrides) apply_override(cfg, o);
    if (seed) cfg["seed"] = *seed;
    const std::uint64_t used_seed = cfg.contains("seed") ? static_cast<std::uint64_t>(parse_number(cfg["seed"], "seed")) : 1;
    cfg["seed"] = used_seed;
    const ProblemConfig problem = build_problem(cfg);
    ensure_output_dir(out_dir);

    Output out;
    if (command == "solve") out = run_solve(problem);
    else if (command == "entropic") out = run_entropic(problem);
    else if (command == "rates") out = run_rates(problem, used_seed);
    else if (command == "constant") out = run_constant(problem);
    else if (command == "clt") out = run_clt(problem, used_seed, threads);
    else out = run_oracle(problem);

    namespace fs = std::filesystem;
    out.summary["command"] = command;
    out.summary["config"] = problem.resolved;
    out.summary["config_hash"] = config_hash(problem.resolved);
    write_csv((fs::path(out_dir) / "results.csv").string(), out.table);
    write_json((fs::path(out_dir) / "summary.json").string(), out.summary);
    Json meta = {{"command", command},
                 {"config_hash", config_hash(problem.resolved)},
                 {"seed", used_seed},
                 {"versions",
                  {{"sdot_lab", kVersion},
                   {"eigen", fmt::format("{}.{}.{}", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION)},
                   {"boost", BOOST_LIB_VERSION},
                   {"fmt", FMT_VERSION},
                   {"compiler", __VERSION__}}},
                 {"timestamp", timestamp()}};
    write_json((fs::path(out_dir) / "meta.json").string(), meta);
    if (svg && !out.svg.empty()) write_text((fs::path(out_dir) / "plot.svg").string(), out.svg);
    std::cout << out.summary.dump(2) << "\n";
    return 0;
  } catch (const ValidationError& e) {
    std::cerr << error_record("validation", e.what(), e.violations()).dump() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << error_record("io", e.what()).dump() << "\n";
    return 3;
  } catch (const ArgumentError& e) {
    std::cerr << error_record("argument", e.what()).dump() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << error_record("runtime", e.what()).dump() << "\n";
    return 1;
  }
}
