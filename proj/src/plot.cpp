// SVG rendering of regret-vs-budget curves.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "storoo/harness.hpp"

namespace storoo {
namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

}  // namespace

void emit_plot(const RegretTable& table, const std::filesystem::path& path,
               double floor) {
  if (!(floor > 0.0)) throw std::invalid_argument("emit_plot: floor must be positive");

  // Series in first-appearance order.
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  double b_min = kInf, b_max = -kInf, r_min = kInf, r_max = -kInf;
  for (const auto& row : table.rows) {
    if (!series.contains(row.method)) order.push_back(row.method);
    const double regret = std::max(row.mean_regret, floor);
    series[row.method].emplace_back(static_cast<double>(row.budget), regret);
    b_min = std::min(b_min, static_cast<double>(row.budget));
    b_max = std::max(b_max, static_cast<double>(row.budget));
    r_min = std::min(r_min, regret);
    r_max = std::max(r_max, regret);
  }
  if (order.empty()) {
    b_min = 0.0, b_max = 1.0, r_min = floor, r_max = 1.0;
  }
  if (b_max <= b_min) b_max = b_min + 1.0;
  double lo_dec = std::floor(std::log10(r_min));
  double hi_dec = std::ceil(std::log10(r_max));
  if (hi_dec <= lo_dec) hi_dec = lo_dec + 1.0;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double b) { return kLeft + (b - b_min) / (b_max - b_min) * plot_w; };
  auto py = [&](double r) {
    return kTop + (hi_dec - std::log10(r)) / (hi_dec - lo_dec) * plot_h;
  };

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"12\">\n",
      kWidth, kHeight);
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << fmt::format(
      "<text x=\"{}\" y=\"22\" font-size=\"14\">simple regret: {} {} tau={}</text>\n",
      kLeft, escape(table.objective), to_string(table.functional),
      format_real(table.tau));

  // Axes and decade grid.
  out << fmt::format(
      "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" "
      "stroke=\"black\"/>\n",
      kLeft, kTop, plot_w, plot_h);
  for (double dec = lo_dec; dec <= hi_dec; dec += 1.0) {
    const double y = py(std::pow(10.0, dec));
    out << fmt::format(
        "<line x1=\"{}\" y1=\"{:.2f}\" x2=\"{}\" y2=\"{:.2f}\" stroke=\"#ddd\"/>\n", kLeft,
        y, kLeft + plot_w, y);
    out << fmt::format(
        "<text x=\"{}\" y=\"{:.2f}\" text-anchor=\"end\">1e{}</text>\n", kLeft - 6,
        y + 4, static_cast<int>(dec));
  }
  for (int i = 0; i <= 4; ++i) {
    const double b = b_min + (b_max - b_min) * i / 4.0;
    out << fmt::format(
        "<text x=\"{:.2f}\" y=\"{}\" text-anchor=\"middle\">{:.0f}</text>\n", px(b),
        kTop + plot_h + 18, b);
  }
  out << fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">budget</text>\n",
                     kLeft + plot_w / 2, kHeight - 16);
  out << fmt::format(
      "<text x=\"18\" y=\"{0}\" text-anchor=\"middle\" "
      "transform=\"rotate(-90 18 {0})\">mean regret (log)</text>\n",
      kTop + plot_h / 2);

  for (std::size_t s = 0; s < order.size(); ++s) {
    const char* color = kPalette[s % std::size(kPalette)];
    std::string points;
    for (const auto& [b, r] : series[order[s]]) {
      if (!points.empty()) points += ' ';
      points += fmt::format("{:.2f},{:.2f}", px(b), py(r));
    }
    out << fmt::format(
        "<polyline data-method=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\" "
        "points=\"{}\"/>\n",
        escape(order[s]), color, points);
    const double ly = kTop + 16.0 + 18.0 * static_cast<double>(s);
    out << fmt::format(
        "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{3}\" "
        "stroke-width=\"2\"/>\n",
        kLeft + plot_w + 12, ly, kLeft + plot_w + 36, color);
    out << fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", kLeft + plot_w + 42,
                       ly + 4, escape(order[s]));
  }
  out << "</svg>\n";
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace storoo
