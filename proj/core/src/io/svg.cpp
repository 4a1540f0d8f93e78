#include "gatenav/io/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "gatenav/common/error.hpp"

namespace gatenav {

namespace {
const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};
constexpr int kPaletteSize = 7;
}  // namespace

void write_plot_svg(const std::filesystem::path& path, const PlotSpec& spec, const std::vector<PlotSeries>& series) {
  if (series.empty()) throw DataError("write_plot_svg: no series");
  double x_min = 1e300, x_max = -1e300, y_min = spec.y_min, y_max = spec.y_max;
  bool any = false;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      if (!spec.fixed_y) {
        if (!any) {
          y_min = y;
          y_max = y;
          any = true;
        } else {
          y_min = std::min(y_min, y);
          y_max = std::max(y_max, y);
        }
      }
    }
  if (x_min > x_max) throw DataError("write_plot_svg: series have no points");
  if (x_max - x_min < 1e-12) x_max = x_min + 1.0;
  if (y_max - y_min < 1e-12) y_max = y_min + 1.0;

  const int width = 640, height = 420;
  const int ml = 64, mr = 24, mt = 40, mb = 52;
  const double pw = width - ml - mr, ph = height - mt - mb;
  auto sx = [&](double x) { return ml + pw * (x - x_min) / (x_max - x_min); };
  auto sy = [&](double y) { return mt + ph * (1.0 - (y - y_min) / (y_max - y_min)); };

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw DataError("cannot open for writing: " + path.string());
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"15\">" << spec.title
     << "</text>\n";

  // Axes with 5 ticks each.
  os << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw << "\" y2=\"" << mt + ph
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << mt + ph
     << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double fx = x_min + (x_max - x_min) * i / 5.0;
    const double fy = y_min + (y_max - y_min) * i / 5.0;
    char buf[64];
    os << "<line x1=\"" << sx(fx) << "\" y1=\"" << mt + ph << "\" x2=\"" << sx(fx) << "\" y2=\"" << mt + ph + 4
       << "\" stroke=\"black\"/>\n";
    std::snprintf(buf, sizeof(buf), "%.3g", fx);
    os << "<text x=\"" << sx(fx) << "\" y=\"" << mt + ph + 18 << "\" text-anchor=\"middle\">" << buf << "</text>\n";
    os << "<line x1=\"" << ml - 4 << "\" y1=\"" << sy(fy) << "\" x2=\"" << ml << "\" y2=\"" << sy(fy)
       << "\" stroke=\"black\"/>\n";
    std::snprintf(buf, sizeof(buf), "%.3g", fy);
    os << "<text x=\"" << ml - 8 << "\" y=\"" << sy(fy) + 4 << "\" text-anchor=\"end\">" << buf << "</text>\n";
  }
  os << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\">" << spec.x_label
     << "</text>\n";
  os << "<text x=\"16\" y=\"" << mt + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << mt + ph / 2 << ")\">" << spec.y_label << "</text>\n";

  for (size_t k = 0; k < series.size(); ++k) {
    const char* color = kPalette[k % kPaletteSize];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : series[k].points) os << sx(x) << "," << sy(y) << " ";
    os << "\"/>\n";
    for (const auto& [x, y] : series[k].points)
      os << "<circle cx=\"" << sx(x) << "\" cy=\"" << sy(y) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    os << "<text x=\"" << ml + pw - 8 << "\" y=\"" << mt + 16 + 16 * static_cast<int>(k)
       << "\" text-anchor=\"end\" fill=\"" << color << "\">" << series[k].name << "</text>\n";
  }
  os << "</svg>\n";
}

}  // namespace gatenav
