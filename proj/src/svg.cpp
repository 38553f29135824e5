#include "vecor/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "vecor/error.hpp"

namespace vecor {

std::string svg_line_chart(const std::vector<SvgSeries>& series,
                           const std::string& x_label,
                           const std::string& y_label, int width, int height) {
  const double ml = 60, mr = 20, mt = 20, mb = 45;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series)
    for (auto [x, y] : s.points) {
      xmin = std::min(xmin, x); xmax = std::max(xmax, x);
      ymin = std::min(ymin, y); ymax = std::max(ymax, y);
    }
  if (!(xmin <= xmax)) { xmin = 0; xmax = 1; ymin = 0; ymax = 1; }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  auto sx = [&](double x) {
    return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr);
  };
  auto sy = [&](double y) {
    return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb);
  };
  char buf[512];
  std::string out;
  std::snprintf(buf, sizeof(buf),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" "
                "height=\"%d\" font-family=\"sans-serif\" font-size=\"12\">\n",
                width, height);
  out += buf;
  std::snprintf(buf, sizeof(buf),
                "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" "
                "fill=\"none\" stroke=\"#333\"/>\n",
                ml, mt, width - ml - mr, height - mt - mb);
  out += buf;
  for (int i = 0; i <= 4; ++i) {
    double xv = xmin + (xmax - xmin) * i / 4.0;
    double yv = ymin + (ymax - ymin) * i / 4.0;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%g\" y=\"%g\" text-anchor=\"middle\">%.4g</text>\n",
                  sx(xv), double(height) - mb + 16, xv);
    out += buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%g\" y=\"%g\" text-anchor=\"end\">%.4g</text>\n",
                  ml - 6, sy(yv) + 4, yv);
    out += buf;
  }
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%g\" y=\"%g\" text-anchor=\"middle\">%s</text>\n",
                ml + (width - ml - mr) / 2, double(height) - 8, x_label.c_str());
  out += buf;
  std::snprintf(buf, sizeof(buf),
                "<text x=\"14\" y=\"%g\" text-anchor=\"middle\" "
                "transform=\"rotate(-90 14 %g)\">%s</text>\n",
                mt + (height - mt - mb) / 2, mt + (height - mt - mb) / 2,
                y_label.c_str());
  out += buf;
  double ly = mt + 14;
  for (const auto& s : series) {
    if (s.points.empty()) continue;
    out += "<polyline fill=\"none\" stroke=\"" + s.color +
           "\" stroke-width=\"1.5\" points=\"";
    for (auto [x, y] : s.points) {
      std::snprintf(buf, sizeof(buf), "%g,%g ", sx(x), sy(y));
      out += buf;
    }
    out += "\"/>\n";
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%g\" y=\"%g\" fill=\"%s\">%s</text>\n",
                  double(width) - mr - 140, ly, s.color.c_str(),
                  s.label.c_str());
    out += buf;
    ly += 16;
  }
  out += "</svg>\n";
  return out;
}

void write_svg(const std::string& path, const std::string& svg) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for write: " + path);
  f << svg;
  if (!f) throw IoError("write failed: " + path);
}

}  // namespace vecor
