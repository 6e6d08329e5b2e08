#pragma once

#include <scanpath/gaze_data.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

namespace scanpath {

enum class FeatureKind { heatmap, hov };

inline std::string_view to_string(FeatureKind k) { return k == FeatureKind::heatmap ? "heatmap" : "hov"; }

inline FeatureKind parse_feature_kind(std::string_view name) {
  if (name == "heatmap") return FeatureKind::heatmap;
  if (name == "hov") return FeatureKind::hov;
  throw ConfigError("unknown feature kind '" + std::string(name) + "' (expected heatmap|hov)");
}

struct FeatureSpec {
  FeatureKind kind = FeatureKind::heatmap;
  int grid_w = 16;
  int grid_h = 16;
  int bins = 36;
  bool hov_length_weighted = true;

  std::size_t length() const {
    return kind == FeatureKind::heatmap ? static_cast<std::size_t>(grid_w) * grid_h : static_cast<std::size_t>(bins);
  }
};

struct FeatureVector {
  std::vector<double> values;
  FeatureKind kind = FeatureKind::heatmap;
  int grid_w = 0;  // heatmap only
  int grid_h = 0;
  int bins = 0;  // hov only
};

namespace detail {

inline void normalize_sum(std::vector<double>& v) {
  const double s = std::accumulate(v.begin(), v.end(), 0.0);
  if (s > 0.0)
    for (auto& x : v) x /= s;
}

inline int cell_of(double v, int cells) {
  return std::clamp(static_cast<int>(std::floor(v * cells)), 0, cells - 1);
}

}  // namespace detail

/// Occupancy grid, row-major with the row taken from y. Sums to 1.
inline FeatureVector featurize_heatmap(const GazeRecording& rec, int grid_w = 16, int grid_h = 16) {
  if (grid_w < 1 || grid_h < 1) throw ArgumentError("featurize_heatmap: grid dimensions must be >= 1");
  if (rec.points.empty()) throw FeatureError("featurize_heatmap: empty recording");
  FeatureVector f;
  f.kind = FeatureKind::heatmap;
  f.grid_w = grid_w;
  f.grid_h = grid_h;
  f.values.assign(static_cast<std::size_t>(grid_w) * grid_h, 0.0);
  for (const auto& p : rec.points) {
    const int col = detail::cell_of(p.x, grid_w);
    const int row = detail::cell_of(p.y, grid_h);
    f.values[static_cast<std::size_t>(row) * grid_w + col] += 1.0;
  }
  detail::normalize_sum(f.values);
  return f;
}

/// Direction histogram of consecutive displacements over [0, 2*pi),
/// optionally weighted by segment length. No movement gives a uniform vector.
inline FeatureVector featurize_hov(const GazeRecording& rec, int bin_count = 36, bool length_weighted = true) {
  if (bin_count < 2) throw ArgumentError("featurize_hov: bin_count must be >= 2");
  if (rec.points.size() < 2) throw FeatureError("featurize_hov: need at least 2 points for velocities");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double width = two_pi / bin_count;
  FeatureVector f;
  f.kind = FeatureKind::hov;
  f.bins = bin_count;
  f.values.assign(static_cast<std::size_t>(bin_count), 0.0);
  for (std::size_t i = 1; i < rec.points.size(); ++i) {
    const double dx = rec.points[i].x - rec.points[i - 1].x;
    const double dy = rec.points[i].y - rec.points[i - 1].y;
    const double len = std::hypot(dx, dy);
    if (len == 0.0) continue;
    double angle = std::atan2(dy, dx);
    if (angle < 0.0) angle += two_pi;
    const int bin = std::min(bin_count - 1, static_cast<int>(std::floor(angle / width)));
    f.values[bin] += length_weighted ? len : 1.0;
  }
  if (std::accumulate(f.values.begin(), f.values.end(), 0.0) == 0.0)
    std::fill(f.values.begin(), f.values.end(), 1.0 / bin_count);
  else
    detail::normalize_sum(f.values);
  return f;
}

inline FeatureVector featurize(const GazeRecording& rec, const FeatureSpec& spec) {
  return spec.kind == FeatureKind::heatmap ? featurize_heatmap(rec, spec.grid_w, spec.grid_h)
                                           : featurize_hov(rec, spec.bins, spec.hov_length_weighted);
}

}  // namespace scanpath
