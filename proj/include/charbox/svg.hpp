#pragma once
// Hand-rolled static SVG scatter plots (1000 x 600): axes, 1-2-5 ticks, grid,
// point series with a small palette, and a legend.  Self-contained text
// output with fixed formatting, so a plot is a pure function of its data.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "csv.hpp"

namespace charbox {

struct ScatterSeries {
  std::string name;
  std::vector<std::pair<double, double>> pts;
};

struct ScatterPlot {
  std::string title, xlabel, ylabel;
  std::vector<ScatterSeries> series;

  std::string render() const;
};

namespace detail {

inline std::string fmt2(double v) {
  char b[40];
  snprintf(b, sizeof b, "%.2f", v);
  return b;
}

// largest 1/2/5 * 10^k step that yields at least `want` intervals
inline double nice_step(double range, int want) {
  if (!(range > 0)) return 1;
  double raw = range / want;
  double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {5.0, 2.0, 1.0})
    if (raw >= m * mag) return m * mag;
  return mag;
}

inline void xml_escape(std::string& out, const std::string& s) {
  for (char c : s) {
    if (c == '&')
      out += "&amp;";
    else if (c == '<')
      out += "&lt;";
    else if (c == '>')
      out += "&gt;";
    else
      out += c;
  }
}

}  // namespace detail

inline std::string ScatterPlot::render() const {
  constexpr int W = 1000, H = 600, ML = 80, MR = 30, MT = 50, MB = 60;
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                  "#9467bd", "#ff7f0e", "#8c564b"};
  constexpr int npal = 6;

  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
  bool any = false;
  for (const auto& s : series)
    for (auto [x, y] : s.pts) {
      if (!std::isfinite(x) || !std::isfinite(y)) fail_invalid("non-finite point in plot data");
      if (!any) {
        xmin = xmax = x;
        ymin = ymax = y;
        any = true;
      }
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (!any) fail_invalid("nothing to plot");
  if (xmax == xmin) {
    xmin -= 1;
    xmax += 1;
  }
  if (ymax == ymin) {
    ymin -= 1;
    ymax += 1;
  }
  double xpad = 0.05 * (xmax - xmin), ypad = 0.05 * (ymax - ymin);
  xmin -= xpad;
  xmax += xpad;
  ymin -= ypad;
  ymax += ypad;

  auto px = [&](double x) { return ML + (x - xmin) / (xmax - xmin) * (W - ML - MR); };
  auto py = [&](double y) { return H - MB - (y - ymin) / (ymax - ymin) * (H - MT - MB); };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1000\" height=\"600\" "
         "viewBox=\"0 0 1000 600\">\n";
  svg += "<rect width=\"1000\" height=\"600\" fill=\"white\"/>\n";

  // grid + ticks
  double xs = detail::nice_step(xmax - xmin, 6), ys = detail::nice_step(ymax - ymin, 6);
  svg += "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#333\">\n";
  for (double t = std::ceil(xmin / xs) * xs; t <= xmax + 1e-9 * xs; t += xs) {
    std::string X = detail::fmt2(px(t));
    svg += "<line x1=\"" + X + "\" y1=\"" + std::to_string(MT) + "\" x2=\"" + X + "\" y2=\"" +
           std::to_string(H - MB) + "\" stroke=\"#ddd\"/>\n";
    svg += "<text x=\"" + X + "\" y=\"" + std::to_string(H - MB + 18) +
           "\" text-anchor=\"middle\">" + fmt_g(t) + "</text>\n";
  }
  for (double t = std::ceil(ymin / ys) * ys; t <= ymax + 1e-9 * ys; t += ys) {
    std::string Y = detail::fmt2(py(t));
    svg += "<line x1=\"" + std::to_string(ML) + "\" y1=\"" + Y + "\" x2=\"" +
           std::to_string(W - MR) + "\" y2=\"" + Y + "\" stroke=\"#ddd\"/>\n";
    svg += "<text x=\"" + std::to_string(ML - 8) + "\" y=\"" + Y +
           "\" text-anchor=\"end\" dominant-baseline=\"middle\">" + fmt_g(t) + "</text>\n";
  }
  svg += "</g>\n";

  // axes
  svg += "<line x1=\"" + std::to_string(ML) + "\" y1=\"" + std::to_string(H - MB) + "\" x2=\"" +
         std::to_string(W - MR) + "\" y2=\"" + std::to_string(H - MB) +
         "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
  svg += "<line x1=\"" + std::to_string(ML) + "\" y1=\"" + std::to_string(MT) + "\" x2=\"" +
         std::to_string(ML) + "\" y2=\"" + std::to_string(H - MB) +
         "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";

  // labels + title
  svg += "<g font-family=\"sans-serif\" font-size=\"15\" fill=\"black\">\n";
  std::string esc;
  esc.clear();
  detail::xml_escape(esc, xlabel);
  svg += "<text x=\"" + std::to_string((ML + W - MR) / 2) + "\" y=\"" + std::to_string(H - 14) +
         "\" text-anchor=\"middle\">" + esc + "</text>\n";
  esc.clear();
  detail::xml_escape(esc, ylabel);
  svg += "<text x=\"20\" y=\"" + std::to_string((MT + H - MB) / 2) +
         "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " +
         std::to_string((MT + H - MB) / 2) + ")\">" + esc + "</text>\n";
  esc.clear();
  detail::xml_escape(esc, title);
  svg += "<text x=\"" + std::to_string(W / 2) +
         "\" y=\"28\" text-anchor=\"middle\" font-size=\"18\">" + esc + "</text>\n";
  svg += "</g>\n";

  // points
  for (size_t si = 0; si < series.size(); ++si) {
    const char* color = palette[si % npal];
    svg += std::string("<g fill=\"") + color + "\" fill-opacity=\"0.75\">\n";
    for (auto [x, y] : series[si].pts)
      svg += "<circle cx=\"" + detail::fmt2(px(x)) + "\" cy=\"" + detail::fmt2(py(y)) +
             "\" r=\"4\"/>\n";
    svg += "</g>\n";
  }

  // legend (only when names are present)
  bool named = false;
  for (const auto& s : series)
    if (!s.name.empty()) named = true;
  if (named) {
    int ly = MT + 10;
    svg += "<g font-family=\"sans-serif\" font-size=\"13\">\n";
    for (size_t si = 0; si < series.size(); ++si) {
      const char* color = palette[si % npal];
      svg += std::string("<circle cx=\"") + std::to_string(W - MR - 150) + "\" cy=\"" +
             std::to_string(ly) + "\" r=\"5\" fill=\"" + color + "\"/>\n";
      esc.clear();
      detail::xml_escape(esc, series[si].name);
      svg += "<text x=\"" + std::to_string(W - MR - 138) + "\" y=\"" + std::to_string(ly + 4) +
             "\">" + esc + "</text>\n";
      ly += 20;
    }
    svg += "</g>\n";
  }

  svg += "</svg>\n";
  return svg;
}

}  // namespace charbox
