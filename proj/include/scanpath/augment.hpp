#pragma once

#include <scanpath/gaze_data.hpp>
#include <scanpath/rng.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <string>
#include <string_view>

namespace scanpath {

enum class AugmentKind { crop, noise, combine, random_points };

inline constexpr AugmentKind kAllAugmentations[] = {AugmentKind::crop, AugmentKind::noise, AugmentKind::combine,
                                                    AugmentKind::random_points};

inline std::string_view to_string(AugmentKind k) {
  switch (k) {
    case AugmentKind::crop: return "crop";
    case AugmentKind::noise: return "noise";
    case AugmentKind::combine: return "combine";
    case AugmentKind::random_points: return "random_points";
  }
  return "crop";
}

struct AugmentOptions {
  double noise_sigma = 0.01;
  double min_crop_fraction = 0.5;
  double max_random_fraction = 0.05;
};

/// Random crop to a contiguous window of at least half the points.
inline GazeRecording augment_crop(const GazeRecording& rec, Rng& rng, const AugmentOptions& opt = {}) {
  const std::size_t n = rec.points.size();
  if (n < 4) throw ArgumentError("augment crop: recording needs at least 4 points");
  const auto min_len = static_cast<std::size_t>(std::ceil(opt.min_crop_fraction * static_cast<double>(n)));
  const auto len = std::uniform_int_distribution<std::size_t>(min_len, n)(rng);
  const auto start = std::uniform_int_distribution<std::size_t>(0, n - len)(rng);
  GazeRecording out = rec;
  out.points.assign(rec.points.begin() + static_cast<std::ptrdiff_t>(start),
                    rec.points.begin() + static_cast<std::ptrdiff_t>(start + len));
  normalize_time_axis(out);
  return out;
}

/// Isotropic Gaussian jitter on x and y, clamped to the unit square.
inline GazeRecording augment_noise(const GazeRecording& rec, Rng& rng, const AugmentOptions& opt = {}) {
  if (rec.points.empty()) throw ArgumentError("augment noise: empty recording");
  GazeRecording out = rec;
  if (opt.noise_sigma <= 0.0) return out;
  std::normal_distribution<double> jitter(0.0, opt.noise_sigma);
  for (auto& p : out.points) {
    p.x = std::clamp(p.x + jitter(rng), 0.0, 1.0);
    p.y = std::clamp(p.y + jitter(rng), 0.0, 1.0);
  }
  return out;
}

/// Appends a random same-class recording; the second part's time follows the
/// first before the whole axis is renormalized.
inline GazeRecording augment_combine(const GazeRecording& rec, std::span<const GazeRecording> pool, Rng& rng) {
  if (pool.empty()) throw ArgumentError("augment combine: pool of same-class recordings is empty");
  if (rec.points.empty()) throw ArgumentError("augment combine: empty recording");
  const auto& other = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
  GazeRecording out = rec;
  out.has_time = rec.has_time && other.has_time;
  const double offset = rec.points.back().t;
  const double other_start = other.points.empty() ? 0.0 : other.points.front().t;
  for (auto p : other.points) {
    p.t = offset + (p.t - other_start);
    out.points.push_back(p);
  }
  normalize_time_axis(out);
  return out;
}

/// Inserts round(u * 5% * n) uniform points, u ~ U[0,1], at random positions.
/// Inserted timestamps average their neighbours so time stays sorted.
inline GazeRecording augment_random_points(const GazeRecording& rec, Rng& rng, const AugmentOptions& opt = {}) {
  if (rec.points.empty()) throw ArgumentError("augment random_points: empty recording");
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  const auto k = static_cast<std::size_t>(std::llround(u * opt.max_random_fraction * static_cast<double>(rec.points.size())));
  GazeRecording out = rec;
  std::uniform_real_distribution<double> coord(0.0, 1.0);
  for (std::size_t i = 0; i < k; ++i) {
    const auto pos = std::uniform_int_distribution<std::size_t>(0, out.points.size())(rng);
    GazePoint p{coord(rng), coord(rng), 0.0};
    if (pos == 0)
      p.t = out.points.front().t;
    else if (pos == out.points.size())
      p.t = out.points.back().t;
    else
      p.t = 0.5 * (out.points[pos - 1].t + out.points[pos].t);
    out.points.insert(out.points.begin() + static_cast<std::ptrdiff_t>(pos), p);
  }
  return out;
}

inline GazeRecording augment(const GazeRecording& rec, AugmentKind kind, Rng& rng,
                             std::span<const GazeRecording> pool = {}, const AugmentOptions& opt = {}) {
  switch (kind) {
    case AugmentKind::crop: return augment_crop(rec, rng, opt);
    case AugmentKind::noise: return augment_noise(rec, rng, opt);
    case AugmentKind::combine: return augment_combine(rec, pool, rng);
    case AugmentKind::random_points: return augment_random_points(rec, rng, opt);
  }
  return rec;
}

}  // namespace scanpath
