#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

namespace regime_scout {

inline std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  std::string s = buf;
  if (s == "-0.000") s = "0.000";
  return s;
}

// Minimal SVG assembly; plots need nothing beyond these primitives.
class SvgBuilder {
 public:
  SvgBuilder(double width, double height) : width_(width), height_(height) {
    out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << svg_num(width_)
         << "\" height=\"" << svg_num(height_) << "\" viewBox=\"0 0 " << svg_num(width_) << " "
         << svg_num(height_) << "\">\n";
  }

  void rect(double x, double y, double w, double h, const std::string& fill) {
    out_ << "<rect x=\"" << svg_num(x) << "\" y=\"" << svg_num(y) << "\" width=\"" << svg_num(w)
         << "\" height=\"" << svg_num(h) << "\" fill=\"" << fill << "\"/>\n";
  }

  void circle(double cx, double cy, double r, const std::string& fill) {
    out_ << "<circle cx=\"" << svg_num(cx) << "\" cy=\"" << svg_num(cy) << "\" r=\"" << svg_num(r)
         << "\" fill=\"" << fill << "\"/>\n";
  }

  void line(double x1, double y1, double x2, double y2, const std::string& stroke,
            double stroke_width = 1.0) {
    out_ << "<line x1=\"" << svg_num(x1) << "\" y1=\"" << svg_num(y1) << "\" x2=\"" << svg_num(x2)
         << "\" y2=\"" << svg_num(y2) << "\" stroke=\"" << stroke << "\" stroke-width=\""
         << svg_num(stroke_width) << "\"/>\n";
  }

  void polyline(const std::vector<std::array<double, 2>>& pts, const std::string& stroke,
                double stroke_width = 1.5) {
    out_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\""
         << svg_num(stroke_width) << "\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i) out_ << ' ';
      out_ << svg_num(pts[i][0]) << ',' << svg_num(pts[i][1]);
    }
    out_ << "\"/>\n";
  }

  void text(double x, double y, const std::string& content, double size = 12.0,
            const std::string& fill = "#000000") {
    out_ << "<text x=\"" << svg_num(x) << "\" y=\"" << svg_num(y) << "\" font-size=\""
         << svg_num(size) << "\" font-family=\"sans-serif\" fill=\"" << fill << "\">" << content
         << "</text>\n";
  }

  std::string finish() {
    out_ << "</svg>\n";
    return out_.str();
  }

 private:
  double width_, height_;
  std::ostringstream out_;
};

// Categorical palette for regime labels; cycles past eight.
inline std::string label_color(int label) {
  static const std::array<const char*, 8> palette = {"#4477aa", "#ee6677", "#228833", "#ccbb44",
                                                     "#66ccee", "#aa3377", "#bbbbbb", "#ff8800"};
  if (label == -1) return "#999999";  // noise
  if (label == -2) return "#000000";  // failed
  return palette[static_cast<std::size_t>(label) % palette.size()];
}

// Viridis-style ramp, t in [0, 1].
inline std::string heat_color(double t) {
  static const std::array<std::array<int, 3>, 11> stops = {{{68, 1, 84},
                                                            {72, 36, 117},
                                                            {65, 68, 135},
                                                            {53, 95, 141},
                                                            {42, 120, 142},
                                                            {33, 144, 141},
                                                            {34, 168, 132},
                                                            {66, 190, 113},
                                                            {122, 209, 81},
                                                            {189, 223, 38},
                                                            {253, 231, 37}}};
  t = std::clamp(t, 0.0, 1.0);
  const double scaled = t * (stops.size() - 1);
  const std::size_t i = std::min(static_cast<std::size_t>(scaled), stops.size() - 2);
  const double f = scaled - static_cast<double>(i);
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                static_cast<int>(std::lround(stops[i][0] + f * (stops[i + 1][0] - stops[i][0]))),
                static_cast<int>(std::lround(stops[i][1] + f * (stops[i + 1][1] - stops[i][1]))),
                static_cast<int>(std::lround(stops[i][2] + f * (stops[i + 1][2] - stops[i][2]))));
  return buf;
}

}  // namespace regime_scout
