#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sdot/config.hpp"
#include "sdot/geometry.hpp"

namespace sdot {

std::uint64_t fnv1a(std::string_view bytes);
// 16 hex digits of the FNV-1a hash of the compact JSON dump.
std::string config_hash(const Json& config);

// Round-trip formatting for doubles in CSV and JSON text.
std::string format_number(double x);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Creates the directory if needed and checks that it is writable.
void ensure_output_dir(const std::string& dir);
void write_text(const std::string& path, const std::string& text);
void write_csv(const std::string& path, const Table& table);
void write_json(const std::string& path, const Json& value);

// Minimal standalone SVG plots.
std::string svg_loglog(const std::vector<double>& x, const std::vector<double>& y, double slope, double intercept,
                       const std::string& title);
std::string svg_diagram(const LaguerreDiagram& diag);

}  // namespace sdot
