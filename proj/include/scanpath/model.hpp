#pragma once

#include <scanpath/shape_model.hpp>
#include <scanpath/update_rule.hpp>

#include <cstdint>
#include <optional>
#include <vector>

namespace scanpath {

struct BuildConfig {
  int max_level = 3;
  std::size_t num_clusters = 4;
  bool dyn_cluster = false;
  UpdateRule rule = UpdateRule::constant;
  std::optional<double> merge_radius;  // unset: per-level default
  double pca_variance = 0.95;
  double time_weight = 1.0;
  bool use_time = true;  // cluster in (x, y, t) when the data carries time
  std::uint64_t seed = 0;
  int kmeans_restarts = 3;
  unsigned threads = 0;  // 0: SCANPATH_THREADS or 1; not persisted

  std::size_t clusters_at(int level) const {
    return dyn_cluster ? apply_update_rule(rule, num_clusters, level) : num_clusters;
  }
};

/// One matched cluster group. At level 1 mean_shift is an absolute position;
/// deeper, it is the mean offset of a subcluster from its parent cluster.
struct ModelNode {
  Vec mean_shift;
  PrincipalComponents shape;
  int level = 1;
  std::size_t support = 1;  // number of shift vectors the shape was fit on
};

struct ScanPathModel {
  std::vector<std::vector<ModelNode>> levels;  // levels[0] is level 1
  int dim = 2;
  int max_level = 1;  // requested depth; levels.size() may be smaller
  BuildConfig build_config;

  int depth() const { return static_cast<int>(levels.size()); }
  bool time_dependent() const { return dim == 3; }
  std::size_t node_count() const {
    std::size_t n = 0;
    for (const auto& l : levels) n += l.size();
    return n;
  }
};

}  // namespace scanpath
