#include "cavity/util/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "cavity/metrics.hpp"

namespace cavity::svg {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
constexpr int kPaletteSize = 8;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// tick positions at 1/2/5 * 10^k covering [lo, hi]
std::vector<double> nice_ticks(double lo, double hi) {
  std::vector<double> ticks;
  if (!(hi > lo)) {
    ticks.push_back(lo);
    return ticks;
  }
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (mag * m >= raw) {
      step = mag * m;
      break;
    }
  }
  const double first = std::ceil(lo / step) * step;
  for (double t = first; t <= hi + step * 1e-9; t += step) {
    ticks.push_back(std::abs(t) < step * 1e-9 ? 0.0 : t);
  }
  return ticks;
}

}  // namespace

std::string render_line_plot(const PlotSpec& spec, const std::vector<Series>& series) {
  const int W = spec.width, H = spec.height;
  const int ml = 72, mr = 24, mt = 40, mb = 56;  // margins
  const double pw = W - ml - mr, ph = H - mt - mb;

  auto tx = [&](double v) { return spec.log2_x ? std::log2(v) : v; };
  auto ty = [&](double v) { return spec.log10_y ? std::log10(v) : v; };

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (auto [x, y] : s.points) {
      if ((spec.log2_x && !(x > 0)) || (spec.log10_y && !(y > 0))) {
        throw std::invalid_argument("svg: log axis requires positive data");
      }
      xmin = std::min(xmin, tx(x));
      xmax = std::max(xmax, tx(x));
      ymin = std::min(ymin, ty(y));
      ymax = std::max(ymax, ty(y));
    }
  }
  if (!(xmax >= xmin)) {  // no points at all
    xmin = 0;
    xmax = 1;
    ymin = 0;
    ymax = 1;
  }
  if (xmax == xmin) {
    xmax += 1;
    xmin -= spec.log2_x ? 0 : 1;
  }
  if (ymax == ymin) {
    ymax += ymax == 0 ? 1 : std::abs(ymax) * 0.5;
    ymin -= ymin == 0 ? 0 : std::abs(ymin) * 0.5;
  }
  if (!spec.log10_y && ymin > 0 && ymin < 0.3 * ymax) ymin = 0;  // anchor at zero when close
  const double ypad = (ymax - ymin) * 0.06;
  ymax += ypad;
  if (spec.log10_y || ymin != 0) ymin -= ypad;

  auto px = [&](double v) { return ml + (tx(v) - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double v) { return mt + ph - (ty(v) - ymin) / (ymax - ymin) * ph; };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(W) +
         "\" height=\"" + std::to_string(H) + "\" viewBox=\"0 0 " + std::to_string(W) + " " +
         std::to_string(H) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + std::to_string(W / 2) + "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"15\" font-weight=\"bold\">" +
         xml_escape(spec.title) + "</text>\n";

  // ticks
  std::vector<double> xticks, yticks;
  if (spec.log2_x) {
    for (int e = static_cast<int>(std::floor(xmin)); e <= static_cast<int>(std::ceil(xmax)); ++e) {
      if (e >= xmin - 1e-9 && e <= xmax + 1e-9) xticks.push_back(std::pow(2.0, e));
    }
  } else {
    xticks = nice_ticks(xmin, xmax);
  }
  if (spec.log10_y) {
    for (int e = static_cast<int>(std::floor(ymin)); e <= static_cast<int>(std::ceil(ymax)); ++e) {
      if (e >= ymin - 1e-9 && e <= ymax + 1e-9) yticks.push_back(std::pow(10.0, e));
    }
  } else {
    yticks = nice_ticks(ymin, ymax);
  }

  for (double t : xticks) {
    const double X = spec.log2_x ? px(t) : ml + (t - xmin) / (xmax - xmin) * pw;
    out += "<line x1=\"" + num(X) + "\" y1=\"" + std::to_string(mt) + "\" x2=\"" + num(X) +
           "\" y2=\"" + std::to_string(mt + static_cast<int>(ph)) +
           "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    out += "<text x=\"" + num(X) + "\" y=\"" + std::to_string(H - mb + 20) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" + num(t) +
           "</text>\n";
  }
  for (double t : yticks) {
    const double Y = spec.log10_y ? py(t) : mt + ph - (t - ymin) / (ymax - ymin) * ph;
    out += "<line x1=\"" + std::to_string(ml) + "\" y1=\"" + num(Y) + "\" x2=\"" +
           std::to_string(W - mr) + "\" y2=\"" + num(Y) +
           "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    out += "<text x=\"" + std::to_string(ml - 8) + "\" y=\"" + num(Y + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" + num(t) +
           "</text>\n";
  }

  // axes
  out += "<rect x=\"" + std::to_string(ml) + "\" y=\"" + std::to_string(mt) + "\" width=\"" +
         num(pw) + "\" height=\"" + num(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
  out += "<text x=\"" + std::to_string(ml + static_cast<int>(pw) / 2) + "\" y=\"" +
         std::to_string(H - 12) + "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">" + xml_escape(spec.xlabel) + "</text>\n";
  out += "<text x=\"18\" y=\"" + std::to_string(mt + static_cast<int>(ph) / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 18 " +
         std::to_string(mt + static_cast<int>(ph) / 2) + ")\">" + xml_escape(spec.ylabel) +
         "</text>\n";

  // series
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % kPaletteSize];
    std::string path;
    for (auto [x, y] : series[s].points) {
      path += path.empty() ? "M" : " L";
      path += num(px(x)) + " " + num(py(y));
    }
    if (!path.empty()) {
      out += "<path d=\"" + path + "\" fill=\"none\" stroke=\"" + color +
             "\" stroke-width=\"2\"/>\n";
    }
    for (auto [x, y] : series[s].points) {
      out += "<circle cx=\"" + num(px(x)) + "\" cy=\"" + num(py(y)) + "\" r=\"3.5\" fill=\"" +
             color + "\"/>\n";
    }
  }

  // legend, top-right inside the frame
  const int lh = 18;
  for (std::size_t s = 0; s < series.size(); ++s) {
    const int y = mt + 14 + static_cast<int>(s) * lh;
    const char* color = kPalette[s % kPaletteSize];
    out += "<line x1=\"" + std::to_string(W - mr - 150) + "\" y1=\"" + std::to_string(y) +
           "\" x2=\"" + std::to_string(W - mr - 122) + "\" y2=\"" + std::to_string(y) +
           "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + std::to_string(W - mr - 116) + "\" y=\"" + std::to_string(y + 4) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" + xml_escape(series[s].label) +
           "</text>\n";
  }

  out += "</svg>\n";
  return out;
}

void write_plot(const std::string& path, const PlotSpec& spec, const std::vector<Series>& series) {
  metrics::note_io();
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("svg: cannot open " + path);
  out << render_line_plot(spec, series);
  if (!out) throw std::runtime_error("svg: write failed for " + path);
}

}  // namespace cavity::svg
