#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "nestmc/errors.hpp"
#include "nestmc/harness.hpp"
#include "nestmc/report_io.hpp"

namespace nestmc {

// Standalone SVG 1.1 log-log MSE chart: log2 N on x, log10 MSE on y, one
// polyline per method with a least-squares slope annotation in the legend.
inline void write_mse_plot(std::ostream& os, const std::vector<SummaryRow>& rows) {
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  for (const SummaryRow& row : rows) {
    if (!(row.n > 0.0) || !(row.mse > 0.0))
      throw DegenerateInput("plot: N and mse must be positive");
    series[row.method].emplace_back(row.n, row.mse);
  }
  if (series.empty()) throw DegenerateInput("plot: no series");

  double x_lo = 1e300, x_hi = -1e300, y_lo = 1e300, y_hi = -1e300;
  for (auto& [name, pts] : series) {
    std::sort(pts.begin(), pts.end());
    for (const auto& [n, mse] : pts) {
      x_lo = std::min(x_lo, std::log2(n));
      x_hi = std::max(x_hi, std::log2(n));
      y_lo = std::min(y_lo, std::log10(mse));
      y_hi = std::max(y_hi, std::log10(mse));
    }
  }
  if (x_hi - x_lo < 1e-9) { x_lo -= 0.5; x_hi += 0.5; }
  if (y_hi - y_lo < 1e-9) { y_lo -= 0.5; y_hi += 0.5; }

  const double width = 720, height = 480;
  const double ml = 70, mr = 20, mt = 20, mb = 50;
  const double pw = width - ml - mr, ph = height - mt - mb;
  auto px = [&](double lx) { return ml + (lx - x_lo) / (x_hi - x_lo) * pw; };
  auto py = [&](double ly) { return mt + (y_hi - ly) / (y_hi - y_lo) * ph; };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return std::string(buf);
  };

  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                  "#9467bd", "#ff7f0e", "#17becf"};

  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width
     << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height
     << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // axes
  os << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw
     << "\" y2=\"" << mt + ph << "\" stroke=\"black\"/>\n"
     << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
     << mt + ph << "\" stroke=\"black\"/>\n";
  for (int t = static_cast<int>(std::ceil(x_lo)); t <= static_cast<int>(std::floor(x_hi)); ++t) {
    const double x = px(t);
    os << "<line x1=\"" << x << "\" y1=\"" << mt + ph << "\" x2=\"" << x << "\" y2=\""
       << mt + ph + 5 << "\" stroke=\"black\"/>\n"
       << "<text x=\"" << x << "\" y=\"" << mt + ph + 20
       << "\" font-size=\"11\" text-anchor=\"middle\">2^" << t << "</text>\n";
  }
  for (int t = static_cast<int>(std::ceil(y_lo)); t <= static_cast<int>(std::floor(y_hi)); ++t) {
    const double y = py(t);
    os << "<line x1=\"" << ml - 5 << "\" y1=\"" << y << "\" x2=\"" << ml << "\" y2=\""
       << y << "\" stroke=\"black\"/>\n"
       << "<text x=\"" << ml - 8 << "\" y=\"" << y + 4
       << "\" font-size=\"11\" text-anchor=\"end\">1e" << t << "</text>\n";
  }
  os << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 12
     << "\" font-size=\"13\" text-anchor=\"middle\">total samples N</text>\n"
     << "<text x=\"16\" y=\"" << mt + ph / 2
     << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << mt + ph / 2 << ")\">MSE</text>\n";

  std::size_t idx = 0;
  double legend_y = mt + 16;
  for (const auto& [name, pts] : series) {
    const char* color = palette[idx % 6];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [n, mse] : pts)
      os << px(std::log2(n)) << ',' << py(std::log10(mse)) << ' ';
    os << "\"/>\n";
    for (const auto& [n, mse] : pts)
      os << "<circle cx=\"" << px(std::log2(n)) << "\" cy=\"" << py(std::log10(mse))
         << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";

    std::string label = name;
    if (pts.size() >= 2) label += " (slope " + num(convergence_slope(pts)) + ")";
    os << "<rect x=\"" << ml + pw - 220 << "\" y=\"" << legend_y - 9
       << "\" width=\"12\" height=\"4\" fill=\"" << color << "\"/>\n"
       << "<text x=\"" << ml + pw - 202 << "\" y=\"" << legend_y
       << "\" font-size=\"12\">" << label << "</text>\n";
    legend_y += 18;
    ++idx;
  }
  os << "</svg>\n";
}

}  // namespace nestmc
