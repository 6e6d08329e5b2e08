#pragma once

#include <scanpath/gaze_data.hpp>
#include <scanpath/model.hpp>
#include <scanpath/parallel.hpp>
#include <scanpath/rng.hpp>
#include <scanpath/shape_model.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace scanpath {

struct GeneratorConfig {
  std::size_t max_clusters = 3;
  std::size_t max_subclusters = 3;
  bool dyn_cluster = false;
  UpdateRule rule = UpdateRule::constant;
  std::uint64_t seed = 0;
  bool clamp_to_unit = true;
  bool weight_by_support = false;  // pick nodes proportional to support instead of uniformly
  unsigned threads = 0;
};

/// Bookkeeping from one generation run.
struct GenerationStats {
  std::size_t branch_draws = 0;        // cluster-count draws at levels >= 2
  std::size_t terminated_branches = 0;  // of those, draws that came up 0
  std::size_t leaves = 0;
  std::size_t clamped_points = 0;
  int levels = 0;
  double min_coordinate = std::numeric_limits<double>::infinity();  // spatial, before clamping
  double max_coordinate = -std::numeric_limits<double>::infinity();
};

/// Sorts points by their t coordinate and maps t onto [0, 1]. If every t is
/// equal the points keep their order and get linear time, as in add_time.
inline GazeRecording normalize_time(std::span<const Vec> points) {
  if (points.empty()) throw ArgumentError("normalize_time: no points");
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return points[a][2] < points[b][2]; });
  GazeRecording rec;
  rec.has_time = true;
  rec.points.reserve(points.size());
  for (auto i : order) rec.points.push_back({points[i][0], points[i][1], points[i][2]});
  const std::size_t n = rec.points.size();
  if (n >= 2 && rec.points.front().t == rec.points.back().t) {
    for (std::size_t i = 0; i < n; ++i) rec.points[i].t = static_cast<double>(i) / static_cast<double>(n - 1);
    return rec;
  }
  normalize_time_axis(rec);
  return rec;
}

/// Keeps emission order and assigns t = i / (n - 1).
inline GazeRecording add_time(std::span<const Vec> points) {
  if (points.empty()) throw ArgumentError("add_time: no points");
  GazeRecording rec;
  rec.has_time = true;
  const std::size_t n = points.size();
  rec.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
    rec.points.push_back({points[i][0], points[i][1], t});
  }
  return rec;
}

namespace detail {

struct PendingCluster {
  Vec position;
  bool terminated = false;
};

inline std::size_t pick_node(const std::vector<ModelNode>& nodes, bool by_support, Rng& rng) {
  if (!by_support) return std::uniform_int_distribution<std::size_t>(0, nodes.size() - 1)(rng);
  std::vector<double> w;
  w.reserve(nodes.size());
  for (const auto& n : nodes) w.push_back(static_cast<double>(n.support));
  return std::discrete_distribution<std::size_t>(w.begin(), w.end())(rng);
}

}  // namespace detail

/// Walks the model top-down, drawing a random number of clusters per live
/// branch and placing subclusters at parent + node mean + sampled shape
/// offset. The final level's positions are the gaze points. A zero cluster
/// draw freezes a branch; its position is carried to the end as a leaf.
inline GazeRecording generate_scanpath(const ScanPathModel& model, const GeneratorConfig& cfg,
                                       std::uint64_t stream = 0, GenerationStats* stats = nullptr) {
  if (cfg.max_clusters < 1 || cfg.max_subclusters < 1)
    throw ArgumentError("generate_scanpath: max_clusters and max_subclusters must be >= 1");
  if (model.levels.empty()) throw GenerationError("generate_scanpath: model has no levels");

  GenerationStats local;
  GenerationStats& st = stats ? *stats : local;
  st = GenerationStats{};

  Rng rng = make_rng(cfg.seed, stream);
  const int depth = std::min(model.depth(), std::max(1, model.max_level));
  std::vector<detail::PendingCluster> pending{{Vec::Zero(model.dim), false}};

  for (int level = 1; level <= depth; ++level) {
    const auto& nodes = model.levels[level - 1];
    if (nodes.empty())
      throw GenerationError("generate_scanpath: model level " + std::to_string(level) + " has no nodes");
    const std::size_t max_c = cfg.dyn_cluster ? apply_update_rule(cfg.rule, cfg.max_clusters, level) : cfg.max_clusters;
    const std::size_t max_s =
        cfg.dyn_cluster ? apply_update_rule(cfg.rule, cfg.max_subclusters, level) : cfg.max_subclusters;
    const std::size_t min_c = level == 1 ? 1 : 0;

    std::vector<detail::PendingCluster> next;
    for (const auto& parent : pending) {
      if (parent.terminated) {
        next.push_back(parent);
        continue;
      }
      const auto num = std::uniform_int_distribution<std::size_t>(min_c, max_c)(rng);
      if (level > 1) ++st.branch_draws;
      if (num == 0) {
        ++st.terminated_branches;
        next.push_back({parent.position, true});
        continue;
      }
      for (std::size_t c = 0; c < num; ++c) {
        const auto& node = nodes[detail::pick_node(nodes, cfg.weight_by_support, rng)];
        const auto subs = std::uniform_int_distribution<std::size_t>(1, max_s)(rng);
        for (std::size_t s = 0; s < subs; ++s) {
          const auto w = sample_weights(node.shape, rng);
          next.push_back({parent.position + synthesize_shift(node.shape, w), false});
        }
      }
    }
    pending = std::move(next);
  }
  st.levels = depth;
  st.leaves = pending.size();

  PointList leaves;
  leaves.reserve(pending.size());
  for (auto& p : pending) {
    st.min_coordinate = std::min({st.min_coordinate, p.position[0], p.position[1]});
    st.max_coordinate = std::max({st.max_coordinate, p.position[0], p.position[1]});
    if (cfg.clamp_to_unit) {
      const Vec before = p.position;
      p.position[0] = std::clamp(p.position[0], 0.0, 1.0);
      p.position[1] = std::clamp(p.position[1], 0.0, 1.0);
      if (before[0] != p.position[0] || before[1] != p.position[1]) ++st.clamped_points;
    }
    leaves.push_back(p.position);
  }
  return model.time_dependent() ? normalize_time(leaves) : add_time(leaves);
}

/// `count` recordings; item i uses stream i, so results do not depend on
/// thread count or scheduling.
inline std::vector<GazeRecording> generate_batch(const ScanPathModel& model, const GeneratorConfig& cfg,
                                                 std::size_t count, const std::string& id_prefix = "gen") {
  if (count < 1) throw ArgumentError("generate_batch: count must be >= 1");
  std::vector<GazeRecording> out(count);
  parallel_for(count, resolve_threads(cfg.threads), [&](std::size_t i) {
    out[i] = generate_scanpath(model, cfg, i);
    out[i].recording_id = id_prefix + std::to_string(i);
  });
  return out;
}

}  // namespace scanpath
