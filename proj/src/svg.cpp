#include "colp/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace colp::svg {

namespace {

constexpr real panel_w = 320.0;
constexpr real panel_h = 220.0;
constexpr real margin_l = 62.0;
constexpr real margin_r = 12.0;
constexpr real margin_t = 26.0;
constexpr real margin_b = 28.0;
constexpr real header_h = 30.0;

std::string num(real v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(real v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

real x_at(const series& s, std::size_t i) { return s.x.empty() ? static_cast<real>(i) : s.x[i]; }

void draw_panel(std::string& out, const panel& p, real ox, real oy) {
  real xmin = std::numeric_limits<real>::infinity();
  real xmax = -xmin;
  real ymin = xmin;
  real ymax = -xmin;
  for (const auto& s : p.lines)
    for (std::size_t i = 0; i < s.y.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, x_at(s, i));
      xmax = std::max(xmax, x_at(s, i));
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  if (!std::isfinite(xmin)) {
    xmin = 0.0;
    xmax = 1.0;
    ymin = 0.0;
    ymax = 1.0;
  }
  if (xmax <= xmin) xmax = xmin + 1.0;
  if (ymax - ymin <= 1e-300 + 1e-12 * std::max(std::abs(ymin), std::abs(ymax))) {
    const real pad = std::max(std::abs(ymin) * 1e-3, 1e-16);
    ymin -= pad;
    ymax += pad;
  }
  const real pw = panel_w - margin_l - margin_r;
  const real ph = panel_h - margin_t - margin_b;
  const real left = ox + margin_l;
  const real top = oy + margin_t;
  auto sx = [&](real x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](real y) { return top + (ymax - y) / (ymax - ymin) * ph; };

  out += "<text x=\"" + num(ox + panel_w / 2) + "\" y=\"" + num(oy + 16) +
         "\" text-anchor=\"middle\" font-size=\"12\">" + escape(p.title) + "</text>\n";
  out += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
         "\" fill=\"none\" stroke=\"#888\"/>\n";
  for (int t = 0; t <= 2; ++t) {
    const real yv = ymin + (ymax - ymin) * t / 2.0;
    out += "<text x=\"" + num(left - 4) + "\" y=\"" + num(sy(yv) + 4) +
           "\" text-anchor=\"end\" font-size=\"9\">" + tick(yv) + "</text>\n";
    const real xv = xmin + (xmax - xmin) * t / 2.0;
    out += "<text x=\"" + num(sx(xv)) + "\" y=\"" + num(top + ph + 14) +
           "\" text-anchor=\"middle\" font-size=\"9\">" + tick(xv) + "</text>\n";
  }
  for (const auto& s : p.lines) {
    out += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.2\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < s.y.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      if (!first) out += ' ';
      out += num(sx(x_at(s, i))) + "," + num(sy(s.y[i]));
      first = false;
    }
    out += "\"><title>" + escape(s.label) + "</title></polyline>\n";
  }
}

}  // namespace

std::string render(const std::vector<panel>& panels, int columns, const std::string& title) {
  columns = std::max(1, columns);
  const int rows = static_cast<int>((panels.size() + static_cast<std::size_t>(columns) - 1) / static_cast<std::size_t>(columns));
  const real width = panel_w * columns;
  const real height = header_h + panel_h * std::max(rows, 1);
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" + num(height) +
                    "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\" font-family=\"sans-serif\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + num(width / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" + escape(title) +
         "</text>\n";
  for (std::size_t i = 0; i < panels.size(); ++i) {
    const int r = static_cast<int>(i) / columns;
    const int c = static_cast<int>(i) % columns;
    draw_panel(out, panels[i], c * panel_w, header_h + r * panel_h);
  }
  out += "</svg>\n";
  return out;
}

}  // namespace colp::svg
