#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sdot/measures.hpp"

namespace sdot {

using Json = nlohmann::json;

// Parsed and validated problem plus experiment settings. `resolved` keeps
// the configuration after overrides so it can be embedded in outputs.
struct ProblemConfig {
  std::string name;
  Json resolved;
  SourceMeasure source;
  DiscreteMeasure target;
};

// Reads a number written as a JSON number, a decimal string or a fraction "p/q".
double parse_number(const Json& value, const std::string& field);

Json load_config_file(const std::string& path);

// Applies "a.b.c=value" overrides; value is parsed as JSON when possible,
// otherwise stored as a string.
void apply_override(Json& config, const std::string& assignment);

// Validates every field and collects all violations into one ValidationError.
ProblemConfig build_problem(const Json& config);

// Dotted lookup with a default.
double setting(const Json& config, const std::string& path, double fallback);
std::string setting(const Json& config, const std::string& path, const std::string& fallback);
bool setting(const Json& config, const std::string& path, bool fallback);
std::vector<double> setting_list(const Json& config, const std::string& path, std::vector<double> fallback);

}  // namespace sdot
