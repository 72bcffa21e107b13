#include "sdot/config.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>

#include <fmt/format.h>

namespace sdot {

namespace {

const Json* find_path(const Json& config, const std::string& path) {
  const Json* node = &config;
  std::stringstream ss(path);
  std::string key;
  while (std::getline(ss, key, '.')) {
    if (!node->is_object() || !node->contains(key)) return nullptr;
    node = &(*node)[key];
  }
  return node;
}

// Collects violations instead of throwing on the first one.
struct Checker {
  std::vector<std::string> errors;

  std::optional<double> number(const Json& obj, const std::string& key, const std::string& path, bool required) {
    if (!obj.is_object() || !obj.contains(key)) {
      if (required) errors.push_back(fmt::format("{} is required", path));
      return std::nullopt;
    }
    try {
      return parse_number(obj[key], path);
    } catch (const ValidationError& e) {
      errors.insert(errors.end(), e.violations().begin(), e.violations().end());
      return std::nullopt;
    }
  }

  template <class F>
  void guard(F&& f) {
    try {
      f();
    } catch (const ValidationError& e) {
      errors.insert(errors.end(), e.violations().begin(), e.violations().end());
    } catch (const Error& e) {
      errors.push_back(e.what());
    }
  }
};

std::optional<Point> parse_point(const Json& value, int dim, const std::string& path, Checker& check) {
  if (value.is_number() || value.is_string()) {
    if (dim != 1) {
      check.errors.push_back(fmt::format("{} must be a coordinate pair in 2D", path));
      return std::nullopt;
    }
    try {
      return Point(parse_number(value, path), 0.0);
    } catch (const ValidationError& e) {
      check.errors.insert(check.errors.end(), e.violations().begin(), e.violations().end());
      return std::nullopt;
    }
  }
  if (!value.is_array() || static_cast<int>(value.size()) != dim) {
    check.errors.push_back(fmt::format("{} must have {} coordinate(s)", path, dim));
    return std::nullopt;
  }
  try {
    Point p = Point::Zero();
    for (int k = 0; k < dim; ++k) p[k] = parse_number(value[static_cast<std::size_t>(k)], fmt::format("{}[{}]", path, k));
    return p;
  } catch (const ValidationError& e) {
    check.errors.insert(check.errors.end(), e.violations().begin(), e.violations().end());
    return std::nullopt;
  }
}

std::optional<Domain> parse_domain(const Json& src, Checker& check) {
  if (!src.contains("domain")) {
    check.errors.push_back("source.domain is required");
    return std::nullopt;
  }
  const Json& d = src["domain"];
  std::optional<Domain> out;
  if (d.contains("interval")) {
    const Json& iv = d["interval"];
    if (!iv.is_array() || iv.size() != 2) {
      check.errors.push_back("source.domain.interval must be [lo, hi]");
      return std::nullopt;
    }
    check.guard([&] { out = Domain::interval(parse_number(iv[0], "source.domain.interval[0]"),
                                             parse_number(iv[1], "source.domain.interval[1]")); });
  } else if (d.contains("polygon")) {
    std::vector<Point> verts;
    bool ok = d["polygon"].is_array();
    if (ok)
      for (std::size_t k = 0; k < d["polygon"].size(); ++k) {
        auto p = parse_point(d["polygon"][k], 2, fmt::format("source.domain.polygon[{}]", k), check);
        if (p) verts.push_back(*p); else ok = false;
      }
    else
      check.errors.push_back("source.domain.polygon must be a list of vertices");
    if (ok) check.guard([&] { out = Domain::polygon(verts); });
  } else {
    check.errors.push_back("source.domain needs 'interval' or 'polygon'");
  }
  return out;
}

std::optional<Density> parse_density(const Json& src, int dim, Checker& check) {
  if (!src.contains("density")) return Density::uniform();
  const Json& d = src["density"];
  const std::string kind = d.value("kind", "uniform");
  std::optional<Density> out;
  if (kind == "uniform") {
    out = Density::uniform();
  } else if (kind == "truncated_gaussian") {
    auto mean = d.contains("mean") ? parse_point(d["mean"], dim, "source.density.mean", check) : std::optional<Point>();
    if (!d.contains("mean")) check.errors.push_back("source.density.mean is required");
    auto sigma = check.number(d, "sigma", "source.density.sigma", true);
    if (mean && sigma) check.guard([&] { out = Density::truncated_gaussian(*mean, *sigma); });
  } else if (kind == "piecewise_linear") {
    std::vector<double> knots, values;
    check.guard([&] {
      for (std::size_t k = 0; k < d.at("knots").size(); ++k)
        knots.push_back(parse_number(d["knots"][k], fmt::format("source.density.knots[{}]", k)));
      for (std::size_t k = 0; k < d.at("values").size(); ++k)
        values.push_back(parse_number(d["values"][k], fmt::format("source.density.values[{}]", k)));
      out = Density::piecewise_linear(knots, values);
    });
  } else {
    check.errors.push_back(fmt::format("source.density.kind '{}' is not one of uniform, truncated_gaussian, piecewise_linear", kind));
  }
  return out;
}

std::optional<std::vector<Point>> parse_sites(const Json& tgt, int dim, Checker& check) {
  std::vector<Point> pts;
  if (tgt.contains("random")) {
    const Json& r = tgt["random"];
    auto count = check.number(r, "count", "target.random.count", true);
    auto seed = check.number(r, "seed", "target.random.seed", true);
    if (!r.contains("box")) check.errors.push_back("target.random.box is required");
    if (!count || !seed || !r.contains("box")) return std::nullopt;
    auto lo = parse_point(r["box"][0], dim, "target.random.box[0]", check);
    auto hi = parse_point(r["box"][1], dim, "target.random.box[1]", check);
    if (!lo || !hi) return std::nullopt;
    if (*count < 1 || std::floor(*count) != *count) {
      check.errors.push_back("target.random.count must be a positive integer");
      return std::nullopt;
    }
    std::mt19937_64 rng(static_cast<std::uint64_t>(*seed));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int k = 0; k < static_cast<int>(*count); ++k) {
      Point p = Point::Zero();
      for (int c = 0; c < dim; ++c) p[c] = (*lo)[c] + ((*hi)[c] - (*lo)[c]) * unit(rng);
      pts.push_back(p);
    }
    return pts;
  }
  if (!tgt.contains("points") || !tgt["points"].is_array()) {
    check.errors.push_back("target.points is required (or target.random)");
    return std::nullopt;
  }
  bool ok = true;
  for (std::size_t k = 0; k < tgt["points"].size(); ++k) {
    auto p = parse_point(tgt["points"][k], dim, fmt::format("target.points[{}]", k), check);
    if (p) pts.push_back(*p); else ok = false;
  }
  if (!ok) return std::nullopt;
  return pts;
}

}  // namespace

double parse_number(const Json& value, const std::string& field) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) {
    const std::string s = value.get<std::string>();
    try {
      std::size_t used = 0;
      const auto slash = s.find('/');
      double out;
      if (slash == std::string::npos) {
        out = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
      } else {
        const std::string a = s.substr(0, slash), b = s.substr(slash + 1);
        std::size_t ua = 0, ub = 0;
        const double num = std::stod(a, &ua), den = std::stod(b, &ub);
        if (ua != a.size() || ub != b.size() || den == 0.0) throw std::invalid_argument(s);
        out = num / den;
      }
      if (std::isfinite(out)) return out;
    } catch (const std::exception&) {
    }
    throw ValidationError({fmt::format("{}: '{}' is not a number", field, s)});
  }
  throw ValidationError({fmt::format("{} must be a number", field)});
}

Json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open config file '{}'", path));
  try {
    return Json::parse(in, nullptr, true, true);
  } catch (const Json::parse_error& e) {
    throw ValidationError({fmt::format("{}: {}", path, e.what())});
  }
}

void apply_override(Json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ArgumentError(fmt::format("override '{}' is not key=value", assignment));
  const std::string path = assignment.substr(0, eq), text = assignment.substr(eq + 1);
  Json value;
  try {
    value = Json::parse(text);
  } catch (const Json::parse_error&) {
    value = text;
  }
  Json* node = &config;
  std::stringstream ss(path);
  std::string key;
  std::vector<std::string> keys;
  while (std::getline(ss, key, '.')) keys.push_back(key);
  for (std::size_t k = 0; k < keys.size(); ++k) {
    if (keys[k].empty()) throw ArgumentError(fmt::format("override '{}' has an empty key", assignment));
    if (!node->is_object()) *node = Json::object();
    node = &(*node)[keys[k]];
  }
  *node = value;
}

ProblemConfig build_problem(const Json& config) {
  Checker check;
  if (!config.is_object()) throw ValidationError({"config must be a JSON object"});
  if (!config.contains("source")) check.errors.push_back("source is required");
  if (!config.contains("target")) check.errors.push_back("target is required");
  if (!check.errors.empty()) throw ValidationError(check.errors);
  const Json& src = config["source"];
  const Json& tgt = config["target"];

  auto domain = parse_domain(src, check);
  const int dim = domain ? domain->dim() : 1;
  auto density = parse_density(src, dim, check);
  auto dmin = check.number(src, "density_min", "source.density_min", true);
  auto dmax = check.number(src, "density_max", "source.density_max", true);
  auto lip = check.number(src, "lipschitz_bound", "source.lipschitz_bound", false);

  auto sites = parse_sites(tgt, dim, check);
  std::optional<Vector> weights;
  if (sites) {
    const auto n = static_cast<Eigen::Index>(sites->size());
    if (tgt.contains("weights")) {
      const Json& w = tgt["weights"];
      if (!w.is_array() || static_cast<Eigen::Index>(w.size()) != n) {
        check.errors.push_back(fmt::format("target.weights must list {} values", n));
      } else {
        Vector v(n);
        bool ok = true;
        for (Eigen::Index k = 0; k < n; ++k) {
          try {
            v[k] = parse_number(w[static_cast<std::size_t>(k)], fmt::format("target.weights[{}]", k));
          } catch (const ValidationError& e) {
            check.errors.insert(check.errors.end(), e.violations().begin(), e.violations().end());
            ok = false;
          }
        }
        if (ok) weights = v;
      }
    } else if (n > 0) {
      weights = Vector::Constant(n, 1.0 / static_cast<double>(n));
    }
  }
  std::optional<double> c0 = check.number(tgt, "min_weight", "target.min_weight", false);

  std::optional<SourceMeasure> source;
  std::optional<DiscreteMeasure> target;
  if (domain && density && dmin && dmax)
    check.guard([&] { source.emplace(*domain, *density, SourceBounds{*dmin, *dmax, lip}); });
  if (sites && weights)
    check.guard([&] {
      const double floor = c0 ? *c0 : (1.0 - 1e-12) * weights->minCoeff() / weights->sum();
      target.emplace(dim, *sites, *weights, floor);
    });
  if (source && target && target->dim() != source->dim())
    check.errors.push_back("target and source differ in dimension");
  if (!check.errors.empty()) throw ValidationError(check.errors);
  if (!source || !target) throw ValidationError({"config is incomplete"});

  return ProblemConfig{config.value("name", std::string("unnamed")), config, std::move(*source), std::move(*target)};
}

double setting(const Json& config, const std::string& path, double fallback) {
  const Json* node = find_path(config, path);
  return node ? parse_number(*node, path) : fallback;
}

std::string setting(const Json& config, const std::string& path, const std::string& fallback) {
  const Json* node = find_path(config, path);
  if (!node) return fallback;
  if (!node->is_string()) throw ValidationError({fmt::format("{} must be a string", path)});
  return node->get<std::string>();
}

bool setting(const Json& config, const std::string& path, bool fallback) {
  const Json* node = find_path(config, path);
  if (!node) return fallback;
  if (node->is_boolean()) return node->get<bool>();
  if (node->is_string()) {
    if (*node == "true") return true;
    if (*node == "false") return false;
  }
  throw ValidationError({fmt::format("{} must be true or false", path)});
}

std::vector<double> setting_list(const Json& config, const std::string& path, std::vector<double> fallback) {
  const Json* node = find_path(config, path);
  if (!node) return fallback;
  if (!node->is_array()) throw ValidationError({fmt::format("{} must be a list", path)});
  std::vector<double> out;
  for (std::size_t k = 0; k < node->size(); ++k) out.push_back(parse_number((*node)[k], fmt::format("{}[{}]", path, k)));
  return out;
}

}  // namespace sdot
