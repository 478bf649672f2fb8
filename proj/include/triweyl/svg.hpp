// triweyl — Floquet–Bloch band structure and three-fold Weyl points of -Δ + V.
// SPDX-License-Identifier: MIT
#pragma once

/// \file svg.hpp
/// \brief Static SVG plot emission: band lines with dispersion-law overlays,
///        plane-section heatmaps, and log-log scan plots.
///
/// Output is fully deterministic — coordinates are formatted with a fixed
/// precision and no timestamps or generator stamps are embedded, so identical
/// configurations produce byte-identical plots.  The resolved config hash is
/// embedded as a leading comment.

#include "triweyl/io.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace triweyl {

namespace svg_detail {

struct Frame {
  double x0, x1, y0, y1;          // data ranges (y0 = bottom value)
  double px0, px1, py0, py1;      // pixel box (py0 = top edge)
  double x(double v) const { return px0 + (v - x0) / (x1 - x0) * (px1 - px0); }
  double y(double v) const { return py1 - (v - y0) / (y1 - y0) * (py1 - py0); }
};

inline void pad_range(double& lo, double& hi) {
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
}

inline std::string open_svg(double w, double h, const std::string& hash) {
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + format_short(w) +
                  "\" height=\"" + format_short(h) + "\" viewBox=\"0 0 " + format_short(w) + " " +
                  format_short(h) + "\">\n";
  s += "<!-- config-hash: " + hash + " -->\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  return s;
}

inline std::string text(double x, double y, const std::string& body, const std::string& anchor,
                        int size = 12) {
  return "<text x=\"" + format_short(x) + "\" y=\"" + format_short(y) + "\" font-family=\"sans-serif\" font-size=\"" +
         std::to_string(size) + "\" text-anchor=\"" + anchor + "\">" + body + "</text>\n";
}

/// Axes with five ticks per side, labels in %.6g.
inline std::string axes(const Frame& f, const std::string& xlabel, const std::string& ylabel) {
  std::string s;
  s += "<rect x=\"" + format_short(f.px0) + "\" y=\"" + format_short(f.py0) + "\" width=\"" +
       format_short(f.px1 - f.px0) + "\" height=\"" + format_short(f.py1 - f.py0) +
       "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double tx = f.x0 + (f.x1 - f.x0) * i / 4.0;
    const double ty = f.y0 + (f.y1 - f.y0) * i / 4.0;
    s += "<line x1=\"" + format_short(f.x(tx)) + "\" y1=\"" + format_short(f.py1) + "\" x2=\"" +
         format_short(f.x(tx)) + "\" y2=\"" + format_short(f.py1 + 5) + "\" stroke=\"black\"/>\n";
    s += text(f.x(tx), f.py1 + 18, format_short(tx), "middle", 11);
    s += "<line x1=\"" + format_short(f.px0 - 5) + "\" y1=\"" + format_short(f.y(ty)) + "\" x2=\"" +
         format_short(f.px0) + "\" y2=\"" + format_short(f.y(ty)) + "\" stroke=\"black\"/>\n";
    s += text(f.px0 - 8, f.y(ty) + 4, format_short(ty), "end", 11);
  }
  s += text(0.5 * (f.px0 + f.px1), f.py1 + 36, xlabel, "middle");
  s += text(f.px0 - 52, f.py0 - 10, ylabel, "start");
  return s;
}

inline std::string polyline(const std::vector<std::pair<double, double>>& pts, const Frame& f,
                            const std::string& color, bool dashed) {
  std::string s = "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\"";
  if (dashed) s += " stroke-dasharray=\"6 4\"";
  s += " points=\"";
  for (const auto& [x, y] : pts)
    s += format_short(f.x(x)) + "," + format_short(f.y(y)) + " ";
  s += "\"/>\n";
  return s;
}

inline const std::array<const char*, 4>& band_colors() {
  static const std::array<const char*, 4> c = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  return c;
}

/// Two-stop linear colormap for heatmaps.
inline std::string heat_color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const int r = static_cast<int>(68 + t * (253 - 68));
  const int g = static_cast<int>(1 + t * (231 - 1));
  const int b = static_cast<int>(84 + t * (37 - 84));
  return "rgb(" + std::to_string(r) + "," + std::to_string(g) + "," + std::to_string(b) + ")";
}

}  // namespace svg_detail

/// Band curves μ_b(λ) along a line through K, with optional dashed overlay
/// polylines (the predicted dispersion).
inline std::string svg_band_line_plot(
    const BandTable& table, const std::vector<std::vector<std::pair<double, double>>>& overlays,
    const std::string& hash) {
  using namespace svg_detail;
  double ylo = table.mu.empty() ? 0.0 : table.mu.front().minCoeff();
  double yhi = table.mu.empty() ? 1.0 : table.mu.front().maxCoeff();
  for (const Eigen::Vector4d& m : table.mu) {
    ylo = std::min(ylo, m.minCoeff());
    yhi = std::max(yhi, m.maxCoeff());
  }
  double xlo = table.p1.empty() ? -1.0 : table.p1.front();
  double xhi = table.p1.empty() ? 1.0 : table.p1.back();
  pad_range(xlo, xhi);
  pad_range(ylo, yhi);
  const Frame f{xlo, xhi, ylo, yhi, 70, 730, 40, 470};
  std::string s = open_svg(760, 520, hash);
  s += axes(f, "lambda", "mu");
  for (int b = 0; b < 4; ++b) {
    std::vector<std::pair<double, double>> pts;
    pts.reserve(table.rows());
    for (std::size_t i = 0; i < table.rows(); ++i) pts.push_back({table.p1[i], table.mu[i][b]});
    s += polyline(pts, f, band_colors()[static_cast<std::size_t>(b)], false);
  }
  for (const auto& ov : overlays) s += polyline(ov, f, "#555555", true);
  s += "</svg>\n";
  return s;
}

/// Three heatmap panels (μ₁, μ₂, μ₃) over the (λ₁, λ₂) grid; `n1` columns of
/// `n2` rows must match the table's row-major (λ₁ outer) ordering.
inline std::string svg_plane_heatmap(const BandTable& table, int n1, int n2,
                                     const std::string& hash) {
  using namespace svg_detail;
  if (!table.two_params || table.rows() != static_cast<std::size_t>(n1) * static_cast<std::size_t>(n2))
    throw std::invalid_argument("svg_plane_heatmap: grid shape mismatch");
  const double panel = 240, gap = 40, left = 60, top = 50;
  std::string s = open_svg(left + 3 * panel + 2 * gap + 20, top + panel + 60, hash);
  for (int band = 0; band < 3; ++band) {
    double lo = table.mu[0][band], hi = lo;
    for (const Eigen::Vector4d& m : table.mu) {
      lo = std::min(lo, m[band]);
      hi = std::max(hi, m[band]);
    }
    const double x0 = left + band * (panel + gap);
    s += text(x0 + panel / 2, top - 12, "mu" + std::to_string(band + 1), "middle");
    const double cw = panel / n1, ch = panel / n2;
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n2; ++j) {
        const double v = table.mu[static_cast<std::size_t>(i) * static_cast<std::size_t>(n2) +
                                  static_cast<std::size_t>(j)][band];
        const double t = hi > lo ? (v - lo) / (hi - lo) : 0.5;
        // j indexes λ₂ ascending; draw bottom-up.
        s += "<rect x=\"" + format_short(x0 + i * cw) + "\" y=\"" +
             format_short(top + panel - (j + 1) * ch) + "\" width=\"" + format_short(cw + 0.5) +
             "\" height=\"" + format_short(ch + 0.5) + "\" fill=\"" + heat_color(t) + "\"/>\n";
      }
    s += "<rect x=\"" + format_short(x0) + "\" y=\"" + format_short(top) + "\" width=\"" +
         format_short(panel) + "\" height=\"" + format_short(panel) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
    s += text(x0, top + panel + 18, "min " + format_short(lo), "start", 11);
    s += text(x0 + panel, top + panel + 18, "max " + format_short(hi), "end", 11);
  }
  s += text(left + 1.5 * panel + gap, top + panel + 40, "lambda (horizontal), lambda2 (vertical)",
            "middle");
  s += "</svg>\n";
  return s;
}

/// Log-log residual plot of a scan with its fitted power law.
inline std::string svg_scan_plot(const std::vector<ScanRecord>& records, const LogLogFit& fit,
                                 const std::string& hash) {
  using namespace svg_detail;
  std::vector<std::pair<double, double>> pts;
  for (const ScanRecord& r : records) {
    if (r.param <= 0.0 || !(std::abs(r.residual) > 0.0)) continue;
    pts.push_back({std::log10(r.param), std::log10(std::abs(r.residual))});
  }
  double xlo = -1, xhi = 0, ylo = -1, yhi = 0;
  if (!pts.empty()) {
    xlo = xhi = pts[0].first;
    ylo = yhi = pts[0].second;
    for (const auto& [x, y] : pts) {
      xlo = std::min(xlo, x);
      xhi = std::max(xhi, x);
      ylo = std::min(ylo, y);
      yhi = std::max(yhi, y);
    }
  }
  pad_range(xlo, xhi);
  pad_range(ylo, yhi);
  const Frame f{xlo, xhi, ylo, yhi, 70, 730, 40, 470};
  std::string s = open_svg(760, 520, hash);
  s += axes(f, "log10(param)", "log10|residual|");
  if (fit.points >= 2) {
    s += polyline({{xlo, fit.intercept + fit.slope * xlo}, {xhi, fit.intercept + fit.slope * xhi}},
                  f, "#555555", true);
    s += text(f.px1 - 8, f.py0 + 16, "order " + format_short(fit.slope), "end");
  }
  for (const auto& [x, y] : pts)
    s += "<circle cx=\"" + format_short(f.x(x)) + "\" cy=\"" + format_short(f.y(y)) +
         "\" r=\"3.5\" fill=\"#1f77b4\"/>\n";
  s += "</svg>\n";
  return s;
}

}  // namespace triweyl
