#pragma once

#include <scanpath/clustering.hpp>
#include <scanpath/gaze_data.hpp>
#include <scanpath/model.hpp>
#include <scanpath/parallel.hpp>
#include <scanpath/rng.hpp>

#include <optional>
#include <span>
#include <vector>

namespace scanpath {

/// One recording's cluster at some level of the hierarchy.
struct ClusterRecord {
  std::size_t recording = 0;
  std::size_t node = 0;  // index into the model level this cluster was matched to
  long parent = -1;      // index into the previous level's records, -1 at level 1
  std::vector<std::size_t> point_indices;  // into the recording's points
  Vec centroid;
};

/// Cluster membership behind a built model, one list per level. Used to
/// audit the hierarchy; the model itself does not keep it.
struct BuildTrace {
  std::vector<std::vector<ClusterRecord>> levels;
};

namespace detail {

inline std::vector<PointList> clustering_points(const Dataset& ds, const BuildConfig& cfg, int& dim) {
  const bool first_timed = ds.recordings.front().has_time;
  for (const auto& r : ds.recordings) {
    if (r.points.empty()) throw ArgumentError("generate_model: recording '" + r.recording_id + "' is empty");
    if (cfg.use_time && r.has_time != first_timed)
      throw SchemaError("generate_model: recordings mix 2-D and 3-D (timed) data");
  }
  dim = cfg.use_time && first_timed ? 3 : 2;
  std::vector<PointList> pts;
  pts.reserve(ds.size());
  for (const auto& r : ds.recordings) pts.push_back(to_points(r, cfg.use_time, cfg.time_weight));
  return pts;
}

inline std::uint64_t cluster_seed(std::uint64_t seed, int level, std::size_t index) {
  return stream_seed(stream_seed(seed, static_cast<std::uint64_t>(level)), index);
}

// Shape over the members of one matched group, shifts taken from the anchor.
inline ModelNode make_node(const ClusterGroup& g, int level, double pca_variance) {
  PointList shifts;
  shifts.reserve(g.members.size());
  for (const auto& m : g.members) shifts.push_back(m.centroid.position - g.parent_mean);
  ModelNode node;
  node.shape = fit_pca(shifts, pca_variance);
  node.mean_shift = node.shape.mean_shift;
  node.level = level;
  node.support = shifts.size();
  return node;
}

}  // namespace detail

/// Builds the level-wise hierarchy. Level 1 clusters every recording and
/// matches the clusters across recordings; each deeper level re-clusters the
/// points of every cluster, expresses subcluster means as shifts from their
/// parent cluster mean, re-matches them within the parent group and fits one
/// shape per matched group.
inline ScanPathModel generate_model(const Dataset& ds, const BuildConfig& cfg, BuildTrace* trace = nullptr) {
  if (ds.empty()) throw ArgumentError("generate_model: empty dataset");
  if (cfg.max_level < 1) throw ArgumentError("generate_model: max_level must be >= 1");
  if (cfg.num_clusters < 1) throw ArgumentError("generate_model: num_clusters must be >= 1");

  ScanPathModel model;
  model.max_level = cfg.max_level;
  model.build_config = cfg;
  const auto pts = detail::clustering_points(ds, cfg, model.dim);
  const unsigned threads = resolve_threads(cfg.threads);
  const KMeansOptions kopts{300, cfg.kmeans_restarts};
  const Vec origin = Vec::Zero(model.dim);

  BuildTrace local;
  BuildTrace& tr = trace ? *trace : local;
  tr.levels.clear();

  // Level 1: the whole dataset is a single virtual parent anchored at the origin.
  {
    const std::size_t k = cfg.clusters_at(1);
    std::vector<ClusterAssignment> assign(ds.size());
    parallel_for(ds.size(), threads, [&](std::size_t r) {
      assign[r] = kmeans(pts[r], k, detail::cluster_seed(cfg.seed, 1, r), kopts, r);
    });
    const double radius = cfg.merge_radius.value_or(default_merge_radius(assign));
    const auto groups = combine_close_subclusters(assign, origin, radius);

    std::vector<ModelNode> nodes;
    std::vector<ClusterRecord> records;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      nodes.push_back(detail::make_node(groups[g], 1, cfg.pca_variance));
      for (const auto& m : groups[g].members) {
        ClusterRecord rec{m.centroid.recording, g, -1, {}, m.centroid.position};
        const auto& labels = assign[m.assignment].labels;
        for (std::size_t i = 0; i < labels.size(); ++i)
          if (labels[i] == m.cluster) rec.point_indices.push_back(i);
        records.push_back(std::move(rec));
      }
    }
    model.levels.push_back(std::move(nodes));
    tr.levels.push_back(std::move(records));
  }

  for (int level = 2; level <= cfg.max_level; ++level) {
    const auto& parents = tr.levels.back();
    const std::size_t parent_nodes = model.levels.back().size();
    const std::size_t k = cfg.clusters_at(level);

    // Subdivide every parent cluster that still has >= 2 points.
    std::vector<std::optional<ClusterAssignment>> sub(parents.size());
    parallel_for(parents.size(), threads, [&](std::size_t c) {
      const auto& pr = parents[c];
      if (pr.point_indices.size() < 2) return;
      PointList local_pts;
      local_pts.reserve(pr.point_indices.size());
      for (auto i : pr.point_indices) local_pts.push_back(pts[pr.recording][i]);
      sub[c] = kmeans(local_pts, k, detail::cluster_seed(cfg.seed, level, c), kopts, pr.recording);
    });

    // Group anchors: count-weighted mean of the parent group's member centroids.
    std::vector<Vec> anchor(parent_nodes, origin);
    std::vector<double> weight(parent_nodes, 0.0);
    std::vector<std::vector<std::size_t>> members_of(parent_nodes);
    for (std::size_t c = 0; c < parents.size(); ++c) {
      const double w = static_cast<double>(parents[c].point_indices.size());
      anchor[parents[c].node] += w * parents[c].centroid;
      weight[parents[c].node] += w;
      members_of[parents[c].node].push_back(c);
    }
    for (std::size_t g = 0; g < parent_nodes; ++g)
      if (weight[g] > 0) anchor[g] /= weight[g];

    // Re-anchor subcluster centers onto their parent group so that matching
    // compares shifts rather than absolute positions.
    std::vector<std::vector<ClusterAssignment>> per_group(parent_nodes);
    std::vector<std::vector<std::size_t>> source_of(parent_nodes);  // parent record per entry
    std::vector<ClusterAssignment> all_level;
    for (std::size_t g = 0; g < parent_nodes; ++g) {
      for (auto c : members_of[g]) {
        if (!sub[c]) continue;
        ClusterAssignment a = *sub[c];
        for (auto& cen : a.centers) cen.position = anchor[g] + (cen.position - parents[c].centroid);
        per_group[g].push_back(a);
        source_of[g].push_back(c);
        all_level.push_back(std::move(a));
      }
    }
    if (all_level.empty()) break;  // every cluster is down to a single point
    const double radius = cfg.merge_radius.value_or(default_merge_radius(all_level));

    std::vector<std::vector<ClusterGroup>> groups(parent_nodes);
    parallel_for(parent_nodes, threads, [&](std::size_t g) {
      if (!per_group[g].empty()) groups[g] = combine_close_subclusters(per_group[g], anchor[g], radius);
    });

    std::vector<ModelNode> nodes;
    std::vector<ClusterRecord> records;
    for (std::size_t g = 0; g < parent_nodes; ++g) {
      for (const auto& grp : groups[g]) {
        const std::size_t node_index = nodes.size();
        nodes.push_back(detail::make_node(grp, level, cfg.pca_variance));
        for (const auto& m : grp.members) {
          const std::size_t pc = source_of[g][m.assignment];
          const auto& parent = parents[pc];
          ClusterRecord rec{parent.recording, node_index, static_cast<long>(pc), {}, {}};
          const auto& labels = sub[pc]->labels;
          for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == m.cluster) rec.point_indices.push_back(parent.point_indices[i]);
          // Recomputed from the points so re-anchoring round-off does not leak in.
          Vec mean = Vec::Zero(model.dim);
          for (auto i : rec.point_indices) mean += pts[rec.recording][i];
          rec.centroid = mean / static_cast<double>(rec.point_indices.size());
          records.push_back(std::move(rec));
        }
      }
    }
    model.levels.push_back(std::move(nodes));
    tr.levels.push_back(std::move(records));
  }
  return model;
}

}  // namespace scanpath
