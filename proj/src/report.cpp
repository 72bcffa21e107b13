#include "sdot/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include <fmt/format.h>

namespace sdot {

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const Json& config) { return fmt::format("{:016x}", fnv1a(config.dump())); }

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", x);
}

void ensure_output_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError(fmt::format("cannot create output directory '{}'", dir));
  const fs::path probe = fs::path(dir) / ".write_probe";
  {
    std::ofstream out(probe);
    if (!out) throw IoError(fmt::format("output directory '{}' is not writable", dir));
  }
  fs::remove(probe, ec);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path));
  out << text;
  if (!out) throw IoError(fmt::format("write to '{}' failed", path));
}

void write_csv(const std::string& path, const Table& table) {
  std::string text;
  const auto line = [&text](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) text += ',';
      const bool quote = cells[k].find_first_of(",\"\n") != std::string::npos;
      if (!quote) {
        text += cells[k];
        continue;
      }
      text += '"';
      for (char c : cells[k]) text += c == '"' ? std::string("\"\"") : std::string(1, c);
      text += '"';
    }
    text += '\n';
  };
  line(table.header);
  for (const auto& row : table.rows) line(row);
  write_text(path, text);
}

void write_json(const std::string& path, const Json& value) { write_text(path, value.dump(2) + "\n"); }

namespace {

struct Frame {
  double x0, x1, y0, y1;
  double px(double x) const { return 60.0 + 400.0 * (x - x0) / (x1 - x0); }
  double py(double y) const { return 340.0 - 300.0 * (y - y0) / (y1 - y0); }
};

std::string svg_open(const std::string& title) {
  return fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"500\" height=\"380\" viewBox=\"0 0 500 380\">\n"
      "<rect width=\"500\" height=\"380\" fill=\"white\"/>\n"
      "<text x=\"250\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">{}</text>\n",
      title);
}

}  // namespace

std::string svg_loglog(const std::vector<double>& x, const std::vector<double>& y, double slope, double intercept,
                       const std::string& title) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t k = 0; k < std::min(x.size(), y.size()); ++k)
    if (x[k] > 0.0 && y[k] > 0.0 && std::isfinite(y[k])) pts.emplace_back(std::log10(x[k]), std::log10(std::abs(y[k])));
  std::string s = svg_open(title);
  if (pts.empty()) return s + "</svg>\n";
  Frame f{pts[0].first, pts[0].first, pts[0].second, pts[0].second};
  for (auto [a, b] : pts) {
    f.x0 = std::min(f.x0, a), f.x1 = std::max(f.x1, a);
    f.y0 = std::min(f.y0, b), f.y1 = std::max(f.y1, b);
  }
  if (f.x1 == f.x0) f.x1 += 1.0;
  if (f.y1 == f.y0) f.y1 += 1.0;
  s += fmt::format("<rect x=\"60\" y=\"40\" width=\"400\" height=\"300\" fill=\"none\" stroke=\"#888\"/>\n");
  s += fmt::format("<text x=\"260\" y=\"370\" text-anchor=\"middle\" font-size=\"12\">log10 eps [{:.2f}, {:.2f}]</text>\n",
                   f.x0, f.x1);
  s += fmt::format("<text x=\"14\" y=\"190\" font-size=\"12\" transform=\"rotate(-90 14 190)\">log10 value [{:.2f}, {:.2f}]</text>\n",
                   f.y0, f.y1);
  for (auto [a, b] : pts) s += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"#1f77b4\"/>\n", f.px(a), f.py(b));
  if (std::isfinite(slope) && std::isfinite(intercept)) {
    const double l10 = std::log(10.0);
    const auto line_y = [&](double a) { return (slope * a * l10 + intercept) / l10; };
    s += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#d62728\"/>\n", f.px(f.x0),
                     f.py(line_y(f.x0)), f.px(f.x1), f.py(line_y(f.x1)));
    s += fmt::format("<text x=\"70\" y=\"58\" font-size=\"12\">slope {:.4f}</text>\n", slope);
  }
  return s + "</svg>\n";
}

std::string svg_diagram(const LaguerreDiagram& diag) {
  const auto [lo, hi] = diag.domain().bounding_box();
  Frame f{lo.x(), hi.x(), lo.y(), hi.y()};
  if (diag.dim() == 1) f.y0 = -0.5, f.y1 = 0.5;
  const double span = std::max(f.x1 - f.x0, f.y1 - f.y0);
  f.x1 = f.x0 + span, f.y1 = f.y0 + span;
  std::string s = svg_open("Laguerre cells");
  static const char* colors[] = {"#aec7e8", "#ffbb78", "#98df8a", "#ff9896", "#c5b0d5", "#c49c94", "#f7b6d2", "#dbdb8d"};
  for (std::size_t i = 0; i < diag.size(); ++i) {
    const Cell& c = diag.cell(i);
    if (c.empty) continue;
    if (diag.dim() == 1) {
      const double a = f.px(c.vertices[0].x()), b = f.px(c.vertices[1].x());
      s += fmt::format("<rect x=\"{:.2f}\" y=\"180\" width=\"{:.2f}\" height=\"20\" fill=\"{}\" stroke=\"black\"/>\n", a,
                       b - a, colors[i % 8]);
      continue;
    }
    s += "<polygon points=\"";
    for (const Point& v : c.vertices) s += fmt::format("{:.2f},{:.2f} ", f.px(v.x()), f.py(v.y()));
    s += fmt::format("\" fill=\"{}\" stroke=\"black\"/>\n", colors[i % 8]);
  }
  for (const Point& y : diag.sites())
    s += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"black\"/>\n", f.px(y.x()),
                     diag.dim() == 1 ? 190.0 : f.py(y.y()));
  return s + "</svg>\n";
}

}  // namespace sdot
