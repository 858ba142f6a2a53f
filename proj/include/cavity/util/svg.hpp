#pragma once

#include <string>
#include <utility>
#include <vector>

namespace cavity::svg {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (x, y)
};

struct PlotSpec {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool log2_x = false;  // rank counts come in powers of two
  bool log10_y = false;
  int width = 760;
  int height = 480;
};

/// Self-contained SVG line chart: axes, ticks, grid, markers, legend.
/// Series are drawn in a fixed palette so reruns produce identical bytes.
std::string render_line_plot(const PlotSpec& spec, const std::vector<Series>& series);

void write_plot(const std::string& path, const PlotSpec& spec, const std::vector<Series>& series);

}  // namespace cavity::svg
