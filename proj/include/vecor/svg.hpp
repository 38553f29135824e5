#pragma once

#include <string>
#include <vector>

namespace vecor {

struct SvgSeries {
  std::string label;
  std::string color;  // e.g. "#1f77b4"
  std::vector<std::pair<double, double>> points;
};

// Minimal line chart, pure text emission; enough for sweep curves.
std::string svg_line_chart(const std::vector<SvgSeries>& series,
                           const std::string& x_label,
                           const std::string& y_label, int width = 640,
                           int height = 420);

void write_svg(const std::string& path, const std::string& svg);

}  // namespace vecor
