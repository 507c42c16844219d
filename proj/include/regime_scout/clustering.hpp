#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "regime_scout/embedding.hpp"
#include "regime_scout/errors.hpp"
#include "regime_scout/linalg.hpp"

namespace regime_scout {

inline constexpr int kNoise = -1;

struct ClusterParams {
  double eps = 1.0;   // neighborhood radius in embedding space
  int min_pts = 4;    // minimum neighborhood size, point itself included

  void validate(const std::string& prefix = "cluster") const {
    if (!(std::isfinite(eps) && eps > 0.0))
      throw ConfigError(prefix + ".eps", "radius must be finite and > 0");
    if (min_pts < 1) throw ConfigError(prefix + ".min_pts", "must be >= 1");
  }
};

struct MergeEvent {
  std::size_t iteration = 0;
  int absorbed = 0;
  int surviving = 0;
};

struct Labeling {
  std::vector<int> labels;  // canonical regime index per point, or kNoise
  int n_regimes = 0;        // 1 + max label in use
  std::vector<MergeEvent> merge_log;
};

// Standard sequential DBSCAN with Euclidean distance. Neighborhoods include the
// point itself and the boundary (d <= eps); a core point has >= min_pts
// neighbors. Cluster ids are handed out in creation order; a border point in
// reach of several clusters joins the one created first. Unreachable points
// come back as kNoise. Quadratic distance scan — fine at desk scale.
inline std::vector<int> dbscan(const std::vector<EmbeddingVector>& points,
                               const ClusterParams& params) {
  params.validate();
  const std::size_t n = points.size();
  if (n == 0) throw DimensionMismatchError("dbscan needs at least one point");
  const std::size_t dim = points.front().size();
  for (const auto& p : points)
    if (p.size() != dim) throw DimensionMismatchError("dbscan points differ in dimension");

  const double eps2 = params.eps * params.eps;
  std::vector<std::vector<std::size_t>> neighbors(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (squared_distance(points[i], points[j]) <= eps2) neighbors[i].push_back(j);

  std::vector<bool> core(n);
  for (std::size_t i = 0; i < n; ++i)
    core[i] = neighbors[i].size() >= static_cast<std::size_t>(params.min_pts);

  constexpr int kUnassigned = -2;
  std::vector<int> labels(n, kUnassigned);
  std::vector<std::size_t> queue;
  int next_id = 0;
  for (std::size_t seed = 0; seed < n; ++seed) {
    if (labels[seed] != kUnassigned || !core[seed]) continue;
    const int id = next_id++;
    labels[seed] = id;
    queue.assign(1, seed);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      for (std::size_t q : neighbors[queue[head]]) {
        if (labels[q] != kUnassigned) continue;
        labels[q] = id;
        if (core[q]) queue.push_back(q);
      }
    }
  }
  for (int& l : labels)
    if (l == kUnassigned) l = kNoise;
  return labels;
}

// Relabels clusters by order of first appearance along the dataset, so label c
// always shows up before label c+1. Noise is preserved.
inline Labeling canonicalize(const std::vector<int>& raw) {
  Labeling out;
  out.labels.assign(raw.size(), kNoise);
  std::map<int, int> remap;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] == kNoise) continue;
    auto [it, inserted] = remap.try_emplace(raw[i], out.n_regimes);
    if (inserted) ++out.n_regimes;
    out.labels[i] = it->second;
  }
  return out;
}

// Re-clusters the full point set and reconciles with the previous labeling:
// each previous label maps to the new cluster holding most of its members
// (clusters only merge as points are added, so this is the whole cluster up to
// border flips); the new cluster takes the smallest label mapped onto it and
// every other one is logged as absorbed. Clusters nobody maps to are new
// regimes and get integers above everything ever used — retired labels are
// never recycled, so GP training targets stay consistent across iterations.
inline Labeling recluster(const std::vector<EmbeddingVector>& points, const ClusterParams& params,
                          const std::optional<Labeling>& previous, std::size_t iteration) {
  Labeling fresh = canonicalize(dbscan(points, params));
  if (!previous) return fresh;
  const Labeling& prev = *previous;

  // overlap[c][l]: shared members between new cluster c and previous label l
  std::vector<std::map<int, std::size_t>> overlap(static_cast<std::size_t>(fresh.n_regimes));
  for (std::size_t i = 0; i < prev.labels.size(); ++i)
    if (fresh.labels[i] >= 0 && prev.labels[i] >= 0)
      ++overlap[static_cast<std::size_t>(fresh.labels[i])][prev.labels[i]];

  int max_label_seen = -1;
  for (int l : prev.labels) max_label_seen = std::max(max_label_seen, l);
  for (const MergeEvent& e : prev.merge_log)
    max_label_seen = std::max({max_label_seen, e.absorbed, e.surviving});

  // home[l] = new cluster holding most of previous label l (tie: smaller c)
  std::map<int, int> home;
  for (int c = 0; c < fresh.n_regimes; ++c)
    for (const auto& [l, cnt] : overlap[static_cast<std::size_t>(c)]) {
      auto it = home.find(l);
      if (it == home.end() ||
          cnt > overlap[static_cast<std::size_t>(it->second)][l])
        home[l] = c;
    }

  std::vector<std::vector<int>> claimants(static_cast<std::size_t>(fresh.n_regimes));
  for (const auto& [l, c] : home) claimants[static_cast<std::size_t>(c)].push_back(l);

  Labeling out;
  out.merge_log = prev.merge_log;
  std::vector<int> final_label(static_cast<std::size_t>(fresh.n_regimes));
  int next_free = max_label_seen + 1;
  for (int c = 0; c < fresh.n_regimes; ++c) {
    auto& ls = claimants[static_cast<std::size_t>(c)];
    if (ls.empty()) {
      final_label[static_cast<std::size_t>(c)] = next_free++;
      continue;
    }
    std::sort(ls.begin(), ls.end());
    final_label[static_cast<std::size_t>(c)] = ls.front();
    for (std::size_t k = 1; k < ls.size(); ++k)
      out.merge_log.push_back({iteration, ls[k], ls.front()});
  }

  out.labels.assign(points.size(), kNoise);
  int max_final = -1;
  for (std::size_t i = 0; i < points.size(); ++i)
    if (fresh.labels[i] >= 0) {
      out.labels[i] = final_label[static_cast<std::size_t>(fresh.labels[i])];
      max_final = std::max(max_final, out.labels[i]);
    }
  out.n_regimes = max_final + 1;
  return out;
}

}  // namespace regime_scout
