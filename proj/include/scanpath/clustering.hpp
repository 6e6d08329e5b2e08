#pragma once

#include <scanpath/rng.hpp>
#include <scanpath/types.hpp>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace scanpath {

struct Centroid {
  Vec position;
  std::size_t count = 0;
  std::size_t recording = 0;
};

struct ClusterAssignment {
  std::vector<std::size_t> labels;  // per point, index into centers
  std::vector<Centroid> centers;
  double wcss = 0.0;
  std::size_t recording = 0;

  std::size_t k() const { return centers.size(); }
};

struct KMeansOptions {
  int max_iterations = 300;
  // Independent k-means++ starts; the lowest-WCSS run is kept.
  int restarts = 1;
};

namespace detail {

inline std::size_t nearest_center(const Vec& p, const std::vector<Vec>& centers, double* dist2 = nullptr) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centers.size(); ++c) {
    const double d = (p - centers[c]).squaredNorm();
    if (d < best_d) {  // strict: lowest index wins ties
      best_d = d;
      best = c;
    }
  }
  if (dist2) *dist2 = best_d;
  return best;
}

inline std::vector<Vec> kmeanspp_init(std::span<const Vec> points, std::size_t k, Rng& rng) {
  const std::size_t n = points.size();
  std::vector<Vec> centers;
  centers.reserve(k);
  std::vector<bool> chosen(n, false);
  std::size_t first = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  centers.push_back(points[first]);
  chosen[first] = true;

  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = (points[i] - centers[0]).squaredNorm();

  while (centers.size() < k) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    std::size_t pick = 0;
    if (total > 0.0) {
      std::discrete_distribution<std::size_t> dist(d2.begin(), d2.end());
      pick = dist(rng);
    } else {
      // All remaining points coincide with a center; take any unused index.
      std::vector<std::size_t> free;
      for (std::size_t i = 0; i < n; ++i)
        if (!chosen[i]) free.push_back(i);
      pick = free[std::uniform_int_distribution<std::size_t>(0, free.size() - 1)(rng)];
    }
    chosen[pick] = true;
    centers.push_back(points[pick]);
    for (std::size_t i = 0; i < n; ++i)
      d2[i] = std::min(d2[i], (points[i] - centers.back()).squaredNorm());
  }
  return centers;
}

inline void assign_points(std::span<const Vec> points, const std::vector<Vec>& centers,
                          std::vector<std::size_t>& labels) {
  for (std::size_t i = 0; i < points.size(); ++i) labels[i] = nearest_center(points[i], centers);
}

// An empty cluster takes over the point farthest from its own center, drawn
// only from clusters that can spare one.
inline void repair_empty(std::span<const Vec> points, std::vector<Vec>& centers,
                         std::vector<std::size_t>& labels) {
  const std::size_t k = centers.size();
  std::vector<std::size_t> counts(k, 0);
  for (auto l : labels) ++counts[l];
  for (std::size_t j = 0; j < k; ++j) {
    if (counts[j] > 0) continue;
    std::size_t far = points.size();
    double far_d = -1.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (counts[labels[i]] < 2) continue;
      const double d = (points[i] - centers[labels[i]]).squaredNorm();
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    --counts[labels[far]];
    labels[far] = j;
    counts[j] = 1;
    centers[j] = points[far];
  }
}

inline void update_centers(std::span<const Vec> points, const std::vector<std::size_t>& labels,
                           std::vector<Vec>& centers, std::vector<std::size_t>& counts) {
  const int dim = static_cast<int>(points[0].size());
  for (auto& c : centers) c = Vec::Zero(dim);
  counts.assign(centers.size(), 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    centers[labels[i]] += points[i];
    ++counts[labels[i]];
  }
  for (std::size_t c = 0; c < centers.size(); ++c) centers[c] /= static_cast<double>(counts[c]);
}

inline ClusterAssignment lloyd(std::span<const Vec> points, std::size_t k, Rng& rng, int max_iterations) {
  std::vector<Vec> centers = kmeanspp_init(points, k, rng);
  std::vector<std::size_t> labels(points.size()), next(points.size()), counts;
  assign_points(points, centers, labels);
  repair_empty(points, centers, labels);
  for (int it = 0; it < max_iterations; ++it) {
    update_centers(points, labels, centers, counts);
    assign_points(points, centers, next);
    repair_empty(points, centers, next);
    if (next == labels) break;
    labels.swap(next);
  }
  update_centers(points, labels, centers, counts);

  ClusterAssignment out;
  out.labels = std::move(labels);
  out.centers.reserve(k);
  for (std::size_t c = 0; c < k; ++c) out.centers.push_back({centers[c], counts[c], 0});
  for (std::size_t i = 0; i < points.size(); ++i)
    out.wcss += (points[i] - centers[out.labels[i]]).squaredNorm();
  return out;
}

}  // namespace detail

/// Lloyd's k-means with k-means++ seeding. With k >= |points| every point is
/// its own cluster. Result always has min(k, |points|) non-empty clusters.
inline ClusterAssignment kmeans(std::span<const Vec> points, std::size_t k, std::uint64_t seed,
                                const KMeansOptions& opts = {}, std::size_t recording = 0) {
  if (k == 0) throw ArgumentError("kmeans: k must be >= 1");
  if (points.empty()) throw ArgumentError("kmeans: no points");

  ClusterAssignment best;
  if (k >= points.size()) {
    best.labels.resize(points.size());
    std::iota(best.labels.begin(), best.labels.end(), std::size_t{0});
    for (const auto& p : points) best.centers.push_back({p, 1, recording});
  } else {
    bool have = false;
    for (int r = 0; r < std::max(1, opts.restarts); ++r) {
      Rng rng = make_rng(seed, static_cast<std::uint64_t>(r));
      auto run = detail::lloyd(points, k, rng, opts.max_iterations);
      if (!have || run.wcss < best.wcss) {
        best = std::move(run);
        have = true;
      }
    }
  }
  best.recording = recording;
  for (auto& c : best.centers) c.recording = recording;
  return best;
}

inline double wcss_of(std::span<const Vec> points, const std::vector<std::size_t>& labels, std::size_t k) {
  std::vector<Vec> centers(k, Vec::Zero(points[0].size()));
  std::vector<std::size_t> counts;
  detail::update_centers(points, labels, centers, counts);
  double s = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) s += (points[i] - centers[labels[i]]).squaredNorm();
  return s;
}

struct GroupMember {
  std::size_t assignment = 0;  // index into the per-recording input list
  std::size_t cluster = 0;     // index into that assignment's centers
  Centroid centroid;
};

/// Centroids matched across recordings. No two members share a recording.
struct ClusterGroup {
  std::vector<GroupMember> members;
  Vec group_mean;   // count-weighted mean of member positions
  Vec parent_mean;  // anchor the group was matched under

  std::size_t total_count() const {
    std::size_t n = 0;
    for (const auto& m : members) n += m.centroid.count;
    return n;
  }
  Vec mean_shift() const { return group_mean - parent_mean; }
};

/// 2x the mean distance from each centroid to its nearest sibling within the
/// same recording. Infinite when no recording has two centroids.
inline double default_merge_radius(std::span<const ClusterAssignment> assignments) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& a : assignments) {
    if (a.centers.size() < 2) continue;
    for (std::size_t i = 0; i < a.centers.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < a.centers.size(); ++j)
        if (i != j) best = std::min(best, (a.centers[i].position - a.centers[j].position).norm());
      sum += best;
      ++n;
    }
  }
  if (n == 0) return std::numeric_limits<double>::infinity();
  return 2.0 * sum / static_cast<double>(n);
}

/// Greedy agglomerative matching of centroids across recordings. Groups are
/// merged closest-first (by count-weighted mean) while their distance is
/// within merge_radius and they share no recording.
inline std::vector<ClusterGroup> combine_close_subclusters(std::span<const ClusterAssignment> per_recording,
                                                           const Vec& parent_group_mean,
                                                           std::optional<double> merge_radius = std::nullopt) {
  if (per_recording.empty()) throw ArgumentError("combine_close_subclusters: no assignments");
  const double radius = merge_radius ? *merge_radius : default_merge_radius(per_recording);

  struct Work {
    ClusterGroup group;
    std::vector<std::size_t> recordings;  // sorted
    Vec weighted_sum;
    double weight = 0.0;
    bool alive = true;
  };
  std::vector<Work> work;
  for (std::size_t a = 0; a < per_recording.size(); ++a) {
    for (std::size_t c = 0; c < per_recording[a].centers.size(); ++c) {
      const auto& cen = per_recording[a].centers[c];
      Work w;
      w.group.members.push_back({a, c, cen});
      w.group.group_mean = cen.position;
      w.group.parent_mean = parent_group_mean;
      w.recordings = {cen.recording};
      w.weight = static_cast<double>(cen.count);
      w.weighted_sum = cen.position * w.weight;
      work.push_back(std::move(w));
    }
  }

  const std::size_t n = work.size();
  const double inf = std::numeric_limits<double>::infinity();
  auto disjoint = [](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
      if (a[i] == b[j]) return false;
      a[i] < b[j] ? ++i : ++j;
    }
    return true;
  };
  // Pair distance, inf when the pair may not merge.
  auto pair_distance = [&](std::size_t i, std::size_t j) {
    if (!disjoint(work[i].recordings, work[j].recordings)) return inf;
    return (work[i].group.group_mean - work[j].group.group_mean).norm();
  };
  std::vector<double> dist(n * n, inf);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) dist[i * n + j] = pair_distance(i, j);

  while (true) {
    double best = inf;
    std::size_t bi = n, bj = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!work[i].alive) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!work[j].alive) continue;
        if (dist[i * n + j] < best) {
          best = dist[i * n + j];
          bi = i;
          bj = j;
        }
      }
    }
    if (bi == n || best > radius) break;

    auto& dst = work[bi];
    auto& src = work[bj];
    for (auto& m : src.group.members) dst.group.members.push_back(std::move(m));
    std::vector<std::size_t> merged;
    std::merge(dst.recordings.begin(), dst.recordings.end(), src.recordings.begin(), src.recordings.end(),
               std::back_inserter(merged));
    dst.recordings = std::move(merged);
    dst.weighted_sum += src.weighted_sum;
    dst.weight += src.weight;
    dst.group.group_mean = dst.weighted_sum / dst.weight;
    src.alive = false;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == bi || !work[k].alive) continue;
      const double d = pair_distance(std::min(k, bi), std::max(k, bi));
      dist[std::min(k, bi) * n + std::max(k, bi)] = d;
    }
  }

  std::vector<ClusterGroup> out;
  for (auto& w : work) {
    if (!w.alive) continue;
    std::sort(w.group.members.begin(), w.group.members.end(), [](const GroupMember& a, const GroupMember& b) {
      return a.assignment != b.assignment ? a.assignment < b.assignment : a.cluster < b.cluster;
    });
    out.push_back(std::move(w.group));
  }
  return out;
}

}  // namespace scanpath
