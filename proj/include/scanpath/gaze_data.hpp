#pragma once

#include <scanpath/types.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace scanpath {

struct GazePoint {
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;  // meaningful only when the owning recording has_time
};

/// One scan path. Time is all-or-nothing per recording, so the flag lives
/// here rather than on every point.
struct GazeRecording {
  std::vector<GazePoint> points;
  bool has_time = false;
  std::string stimulus;
  std::string participant;
  std::string recording_id;
};

enum class ClassKey { stimulus, participant };

inline std::string_view to_string(ClassKey key) {
  return key == ClassKey::stimulus ? "stimulus" : "participant";
}

inline ClassKey parse_class_key(std::string_view name) {
  if (name == "stimulus") return ClassKey::stimulus;
  if (name == "participant") return ClassKey::participant;
  throw ConfigError("unknown class key '" + std::string(name) + "' (expected stimulus|participant)");
}

inline const std::string& class_label(const GazeRecording& rec, ClassKey key) {
  return key == ClassKey::stimulus ? rec.stimulus : rec.participant;
}

struct Dataset {
  std::vector<GazeRecording> recordings;
  ClassKey class_key = ClassKey::stimulus;

  bool empty() const { return recordings.empty(); }
  std::size_t size() const { return recordings.size(); }
  const std::string& label(std::size_t i) const { return class_label(recordings[i], class_key); }

  /// Distinct class labels in first-appearance order.
  std::vector<std::string> classes() const {
    std::vector<std::string> out;
    for (const auto& r : recordings) {
      const auto& l = class_label(r, class_key);
      if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
    }
    return out;
  }

  std::size_t total_points() const {
    std::size_t n = 0;
    for (const auto& r : recordings) n += r.points.size();
    return n;
  }
};

/// Column mapping for delimiter-separated gaze files. x and y are required;
/// the other columns are used when present in the header.
struct CsvFormat {
  char delimiter = ',';
  std::string x = "x";
  std::string y = "y";
  std::string t = "t";
  std::string rec = "rec";
  std::string stimulus = "stimulus";
  std::string participant = "participant";
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
}

inline std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline int find_column(const std::vector<std::string_view>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

}  // namespace detail

/// Reads rows into recordings grouped by the rec column (first-appearance
/// order, row order preserved). Coordinates are left as read.
inline Dataset read_recordings(std::istream& in, const CsvFormat& fmt = {},
                               const std::string& source = "<stream>") {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> header;
  std::string header_line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!detail::trim(line).empty()) {
      header_line = line;
      header = detail::split(header_line, fmt.delimiter);
      break;
    }
  }
  if (header.empty()) throw ArgumentError(source + ": empty dataset (no header row)");

  const int cx = detail::find_column(header, fmt.x);
  const int cy = detail::find_column(header, fmt.y);
  const int ct = detail::find_column(header, fmt.t);
  const int crec = detail::find_column(header, fmt.rec);
  const int cstim = detail::find_column(header, fmt.stimulus);
  const int cpart = detail::find_column(header, fmt.participant);
  if (cx < 0 || cy < 0)
    throw SchemaError(source + ": header must name columns '" + fmt.x + "' and '" + fmt.y + "'");

  Dataset ds;
  std::unordered_map<std::string, std::size_t> index_of;
  std::vector<std::size_t> first_line;  // per recording, for schema messages

  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split(line, fmt.delimiter);
    auto cell = [&](int c) -> std::string_view {
      return c >= 0 && static_cast<std::size_t>(c) < cells.size() ? cells[c] : std::string_view{};
    };
    const auto where = source + ":" + std::to_string(line_no);

    const auto x = detail::parse_double(cell(cx));
    const auto y = detail::parse_double(cell(cy));
    if (!x || !y) throw ParseError(where + ": malformed row (non-numeric x/y): '" + line + "'");

    std::optional<double> t;
    if (ct >= 0 && !cell(ct).empty()) {
      t = detail::parse_double(cell(ct));
      if (!t) throw ParseError(where + ": malformed timestamp '" + std::string(cell(ct)) + "'");
    }

    const std::string id = crec >= 0 ? std::string(cell(crec)) : std::string("0");
    auto [it, inserted] = index_of.try_emplace(id, ds.recordings.size());
    if (inserted) {
      GazeRecording rec;
      rec.recording_id = id;
      rec.has_time = t.has_value();
      rec.stimulus = std::string(cell(cstim));
      rec.participant = std::string(cell(cpart));
      ds.recordings.push_back(std::move(rec));
      first_line.push_back(line_no);
    }
    auto& rec = ds.recordings[it->second];
    if (rec.has_time != t.has_value())
      throw SchemaError(where + ": recording '" + id +
                        "' mixes rows with and without timestamps");
    if (t && !rec.points.empty() && *t < rec.points.back().t)
      throw SchemaError(where + ": timestamps of recording '" + id + "' are not non-decreasing");
    rec.points.push_back({*x, *y, t.value_or(0.0)});
  }
  if (ds.recordings.empty()) throw ArgumentError(source + ": empty dataset (no data rows)");
  return ds;
}

inline Dataset load_recordings(const std::string& path, const CsvFormat& fmt = {}) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_recordings(in, fmt, path);
}

/// Writes the canonical schema: x,y[,t],rec,stimulus,participant.
inline void write_recordings(std::ostream& out, const Dataset& ds, char delimiter = ',') {
  const bool any_time = std::any_of(ds.recordings.begin(), ds.recordings.end(),
                                    [](const GazeRecording& r) { return r.has_time; });
  const char d = delimiter;
  out << "x" << d << "y";
  if (any_time) out << d << "t";
  out << d << "rec" << d << "stimulus" << d << "participant" << '\n';
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& r : ds.recordings) {
    for (const auto& p : r.points) {
      out << p.x << d << p.y;
      if (any_time) {
        out << d;
        if (r.has_time) out << p.t;
      }
      out << d << r.recording_id << d << r.stimulus << d << r.participant << '\n';
    }
  }
}

inline void save_recordings(const std::string& path, const Dataset& ds, char delimiter = ',') {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  write_recordings(out, ds, delimiter);
  if (!out) throw Error("write failed for '" + path + "'");
}

struct SpatialBounds {
  double x_min = 0.0, x_max = 1.0;
  double y_min = 0.0, y_max = 1.0;
};

inline SpatialBounds compute_bounds(const Dataset& ds) {
  SpatialBounds b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
                  std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& r : ds.recordings)
    for (const auto& p : r.points) {
      b.x_min = std::min(b.x_min, p.x);
      b.x_max = std::max(b.x_max, p.x);
      b.y_min = std::min(b.y_min, p.y);
      b.y_max = std::max(b.y_max, p.y);
    }
  return b;
}

namespace detail {

// Affine map of [lo, hi] onto [0, 1]; degenerate interval maps to `flat`.
inline double unit_map(double v, double lo, double hi, double flat) {
  if (!(hi > lo)) return flat;
  return std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
}

}  // namespace detail

/// Maps t of one recording onto [0,1]; a constant time axis maps to 0.
inline void normalize_time_axis(GazeRecording& rec) {
  if (!rec.has_time || rec.points.empty()) return;
  auto [lo, hi] = std::minmax_element(rec.points.begin(), rec.points.end(),
                                      [](const GazePoint& a, const GazePoint& b) { return a.t < b.t; });
  const double t0 = lo->t, t1 = hi->t;
  for (auto& p : rec.points) p.t = detail::unit_map(p.t, t0, t1, 0.0);
}

/// Spatial axes share one set of bounds across the dataset (computed when not
/// given); time is normalized per recording.
inline Dataset normalize(Dataset ds, std::optional<SpatialBounds> bounds = std::nullopt) {
  if (ds.empty()) throw ArgumentError("normalize: empty dataset");
  const SpatialBounds b = bounds ? *bounds : compute_bounds(ds);
  for (auto& r : ds.recordings) {
    for (auto& p : r.points) {
      p.x = detail::unit_map(p.x, b.x_min, b.x_max, 0.5);
      p.y = detail::unit_map(p.y, b.y_min, b.y_max, 0.5);
    }
    normalize_time_axis(r);
  }
  return ds;
}

/// Clustering-space coordinates: (x, y) or (x, y, time_weight * t).
inline PointList to_points(const GazeRecording& rec, bool use_time, double time_weight = 1.0) {
  const bool timed = use_time && rec.has_time;
  PointList out;
  out.reserve(rec.points.size());
  for (const auto& p : rec.points) {
    Vec v(timed ? 3 : 2);
    v[0] = p.x;
    v[1] = p.y;
    if (timed) v[2] = time_weight * p.t;
    out.push_back(v);
  }
  return out;
}

}  // namespace scanpath
