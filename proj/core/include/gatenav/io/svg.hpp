#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace gatenav {

struct PlotSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  double y_min = 0.0;
  double y_max = 1.0;
  bool fixed_y = false;  // false: fit to data
};

// Dependency-free SVG polyline plot with axes, ticks and a legend.
void write_plot_svg(const std::filesystem::path& path, const PlotSpec& spec, const std::vector<PlotSeries>& series);

}  // namespace gatenav
