#pragma once

// Synthetic gaze data shared by the unit and acceptance suites.

#include <scanpath/gaze_data.hpp>
#include <scanpath/rng.hpp>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

namespace scanpath::testing {

struct Blob {
  double x, y;
};

/// Points visit the blobs in order, `per_blob` samples each, Gaussian spread
/// `sigma`; time is linear over the recording.
inline GazeRecording blob_recording(const std::vector<Blob>& blobs, std::size_t per_blob, double sigma, Rng& rng,
                                    std::string id = "r", bool with_time = true) {
  GazeRecording rec;
  rec.recording_id = std::move(id);
  rec.has_time = with_time;
  std::normal_distribution<double> noise(0.0, sigma);
  const std::size_t n = blobs.size() * per_blob;
  std::size_t i = 0;
  for (const auto& b : blobs)
    for (std::size_t k = 0; k < per_blob; ++k, ++i) {
      const double t = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
      rec.points.push_back({std::clamp(b.x + noise(rng), 0.0, 1.0), std::clamp(b.y + noise(rng), 0.0, 1.0), t});
    }
  return rec;
}

/// Two recordings, each with 50 points around (0.2, 0.2) and 50 around (0.8, 0.8).
inline Dataset two_blob_fixture(std::uint64_t seed = 11, bool with_time = false) {
  Rng rng = make_rng(seed);
  Dataset ds;
  for (int r = 0; r < 2; ++r)
    ds.recordings.push_back(
        blob_recording({{0.2, 0.2}, {0.8, 0.8}}, 50, 0.02, rng, "rec" + std::to_string(r), with_time));
  return ds;
}

/// `recordings` recordings over K blobs with spread sigma, in untimed 2-D.
inline Dataset blob_dataset(const std::vector<Blob>& blobs, std::size_t recordings, std::size_t per_blob,
                            double sigma, std::uint64_t seed, bool with_time = false) {
  Rng rng = make_rng(seed);
  Dataset ds;
  for (std::size_t r = 0; r < recordings; ++r)
    ds.recordings.push_back(blob_recording(blobs, per_blob, sigma, rng, "rec" + std::to_string(r), with_time));
  return ds;
}

/// Class-specific fixation layouts: four classes, each a different set of
/// three fixation regions.
inline std::vector<std::vector<Blob>> four_class_layouts() {
  return {
      {{0.15, 0.15}, {0.5, 0.2}, {0.85, 0.15}},
      {{0.15, 0.85}, {0.5, 0.8}, {0.85, 0.85}},
      {{0.15, 0.15}, {0.15, 0.5}, {0.15, 0.85}},
      {{0.85, 0.15}, {0.85, 0.5}, {0.85, 0.85}},
  };
}

/// `per_class` recordings per class; each recording visits its class's regions
/// in a random order with per-recording jitter of the region positions.
inline Dataset four_class_fixture(std::size_t per_class = 20, std::uint64_t seed = 5) {
  Rng rng = make_rng(seed);
  const auto layouts = four_class_layouts();
  std::normal_distribution<double> shift(0.0, 0.03);
  std::uniform_int_distribution<std::size_t> count(15, 25);
  Dataset ds;
  ds.class_key = ClassKey::stimulus;
  for (std::size_t c = 0; c < layouts.size(); ++c) {
    for (std::size_t r = 0; r < per_class; ++r) {
      auto blobs = layouts[c];
      std::shuffle(blobs.begin(), blobs.end(), rng);
      for (auto& b : blobs) {
        b.x += shift(rng);
        b.y += shift(rng);
      }
      GazeRecording rec;
      rec.recording_id = "c" + std::to_string(c) + "_" + std::to_string(r);
      rec.stimulus = "s" + std::to_string(c);
      rec.participant = "p" + std::to_string(r % 5);
      rec.has_time = true;
      std::normal_distribution<double> noise(0.0, 0.02);
      for (const auto& b : blobs) {
        const std::size_t n = count(rng);
        for (std::size_t k = 0; k < n; ++k)
          rec.points.push_back({std::clamp(b.x + noise(rng), 0.0, 1.0), std::clamp(b.y + noise(rng), 0.0, 1.0), 0.0});
      }
      for (std::size_t i = 0; i < rec.points.size(); ++i)
        rec.points[i].t = static_cast<double>(i) / static_cast<double>(rec.points.size() - 1);
      ds.recordings.push_back(std::move(rec));
    }
  }
  return ds;
}

}  // namespace scanpath::testing
