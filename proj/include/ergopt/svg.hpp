#pragma once

// Plain SVG scatter plots with a closed hull polygon. Output is a pure
// function of the input, so identical data gives identical bytes.

#include <cstdio>
#include <string>
#include <vector>

#include "matgeo.hpp"

namespace ergopt {

using Point2 = std::array<double, 2>;

/// Coordinates of v - mean(v) in the orthonormal basis (1,-1,0)/sqrt2,
/// (1,1,-2)/sqrt6 of the trace-zero plane of R^3.
inline Point2 project_trace_zero(std::span<const double> v) {
  require(v.size() == 3, "trace-zero projection needs 3 coordinates");
  const double m = (v[0] + v[1] + v[2]) / 3;
  const double a = v[0] - m, b = v[1] - m, c = v[2] - m;
  return {(a - b) / std::sqrt(2.0), (a + b - 2 * c) / std::sqrt(6.0)};
}

/// Inverse of project_trace_zero on the trace-zero plane.
inline std::array<double, 3> lift_trace_zero(const Point2& p) {
  const double s2 = std::sqrt(2.0), s6 = std::sqrt(6.0);
  return {p[0] / s2 + p[1] / s6, -p[0] / s2 + p[1] / s6, -2 * p[1] / s6};
}

/// Points for plotting: 2d data as is, 3d data projected, other dimensions
/// rejected.
inline std::vector<Point2> plot_coordinates(const std::vector<std::vector<double>>& pts) {
  std::vector<Point2> out;
  for (const auto& p : pts) {
    if (p.size() == 2)
      out.push_back({p[0], p[1]});
    else if (p.size() == 3)
      out.push_back(project_trace_zero(p));
    else
      throw InvalidArgument("only 2- and 3-dimensional data can be plotted");
  }
  return out;
}

struct SvgPlot {
  std::string title;
  std::vector<Point2> points;  // scatter
  std::vector<Point2> hull;    // closed polygon, in order
  int width = 480;
  int height = 480;
};

namespace detail {
inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}
}  // namespace detail

inline std::string render_svg(const SvgPlot& plot) {
  double xmin = -1, xmax = 1, ymin = -1, ymax = 1;
  bool any = false;
  auto extend = [&](const Point2& p) {
    if (!std::isfinite(p[0]) || !std::isfinite(p[1])) return;
    if (!any) {
      xmin = xmax = p[0];
      ymin = ymax = p[1];
      any = true;
    }
    xmin = std::min(xmin, p[0]);
    xmax = std::max(xmax, p[0]);
    ymin = std::min(ymin, p[1]);
    ymax = std::max(ymax, p[1]);
  };
  for (const auto& p : plot.points) extend(p);
  for (const auto& p : plot.hull) extend(p);
  // keep the origin in view so the axes are always drawn
  xmin = std::min(xmin, 0.0);
  xmax = std::max(xmax, 0.0);
  ymin = std::min(ymin, 0.0);
  ymax = std::max(ymax, 0.0);
  const double span = std::max({xmax - xmin, ymax - ymin, 1e-9});
  const double margin = 0.08 * span;
  xmin -= margin;
  xmax += margin;
  ymin -= margin;
  ymax += margin;

  const double w = plot.width, h = plot.height;
  const double sx = w / (xmax - xmin), sy = h / (ymax - ymin);
  const double s = std::min(sx, sy);
  auto X = [&](double x) { return detail::fmt((x - xmin) * s); };
  auto Y = [&](double y) { return detail::fmt(h - (y - ymin) * s); };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(plot.width) + "\" height=\"" +
         std::to_string(plot.height) + "\" viewBox=\"0 0 " + std::to_string(plot.width) + " " +
         std::to_string(plot.height) + "\">\n";
  out += "<title>" + detail::xml_escape(plot.title) + "</title>\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<line class=\"axis\" x1=\"" + X(xmin) + "\" y1=\"" + Y(0) + "\" x2=\"" + X(xmax) + "\" y2=\"" + Y(0) +
         "\" stroke=\"#999\" stroke-width=\"1\"/>\n";
  out += "<line class=\"axis\" x1=\"" + X(0) + "\" y1=\"" + Y(ymin) + "\" x2=\"" + X(0) + "\" y2=\"" + Y(ymax) +
         "\" stroke=\"#999\" stroke-width=\"1\"/>\n";
  if (!plot.hull.empty()) {
    out += "<polygon class=\"hull\" points=\"";
    for (std::size_t i = 0; i < plot.hull.size(); ++i) {
      if (i) out += " ";
      out += X(plot.hull[i][0]) + "," + Y(plot.hull[i][1]);
    }
    out += "\" fill=\"#cde\" fill-opacity=\"0.5\" stroke=\"#246\" stroke-width=\"1.5\"/>\n";
  }
  for (const auto& p : plot.points) {
    if (!std::isfinite(p[0]) || !std::isfinite(p[1])) continue;
    out += "<circle class=\"point\" cx=\"" + X(p[0]) + "\" cy=\"" + Y(p[1]) + "\" r=\"2.5\" fill=\"#c33\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace ergopt
