#pragma once

#include <scanpath/gaze_data.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>

namespace scanpath {

namespace detail {

// Blue (t = 0) through green to red (t = 1).
inline std::string ramp_color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const double r = t < 0.5 ? 0.0 : (t - 0.5) * 2.0;
  const double g = t < 0.5 ? t * 2.0 : (1.0 - t) * 2.0;
  const double b = t < 0.5 ? 1.0 - t * 2.0 : 0.0;
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(r * 255 + 0.5), static_cast<int>(g * 255 + 0.5),
                static_cast<int>(b * 255 + 0.5));
  return buf;
}

}  // namespace detail

/// One polyline per recording over the unit square, points coloured by time.
/// Recordings without time are coloured by sample index.
inline void render_svg(std::ostream& os, const Dataset& ds, int size = 800) {
  const double margin = 10.0;
  const double scale = size - 2 * margin;
  auto px = [&](double v) { return margin + v * scale; };
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\" viewBox=\"0 0 "
     << size << ' ' << size << "\">\n"
     << "<rect x=\"0\" y=\"0\" width=\"" << size << "\" height=\"" << size << "\" fill=\"white\"/>\n";
  for (const auto& rec : ds.recordings) {
    os << "<g id=\"" << rec.recording_id << "\">\n<polyline fill=\"none\" stroke=\"#888888\" stroke-opacity=\"0.5\" "
          "stroke-width=\"1\" points=\"";
    for (std::size_t i = 0; i < rec.points.size(); ++i) {
      if (i) os << ' ';
      os << px(rec.points[i].x) << ',' << px(rec.points[i].y);
    }
    os << "\"/>\n";
    const std::size_t n = rec.points.size();
    for (std::size_t i = 0; i < n; ++i) {
      const double t = rec.has_time ? rec.points[i].t : (n > 1 ? static_cast<double>(i) / (n - 1) : 0.0);
      os << "<circle cx=\"" << px(rec.points[i].x) << "\" cy=\"" << px(rec.points[i].y) << "\" r=\"2\" fill=\""
         << detail::ramp_color(t) << "\"/>\n";
    }
    os << "</g>\n";
  }
  os << "</svg>\n";
}

inline void save_svg(const std::string& path, const Dataset& ds, int size = 800) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  render_svg(out, ds, size);
}

}  // namespace scanpath
