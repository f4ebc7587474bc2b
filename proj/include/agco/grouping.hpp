#pragma once

#include <limits>
#include <span>
#include <vector>

#include "agco/model.hpp"

namespace agco {

struct Clustering {
  std::vector<std::size_t> labels;
  std::vector<Position> centroids;
  std::size_t iterations{0};
};

inline double squared_distance(const Position& a, const Position& b) {
  const double dx = a.x - b.x, dy = a.y - b.y, dh = a.h - b.h;
  return dx * dx + dy * dy + dh * dh;
}

/// Each point to its closest seed; ties go to the lowest seed index.
inline std::vector<std::size_t> nearest_seed_assignment(std::span<const Position> points,
                                                        std::span<const Position> seeds) {
  if (seeds.empty() && !points.empty()) throw ValidationError("nearest-seed grouping needs at least one seed");
  std::vector<std::size_t> labels(points.size(), 0);
  for (std::size_t p = 0; p < points.size(); ++p) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < seeds.size(); ++c) {
      const double d = squared_distance(points[p], seeds[c]);
      if (d < best) {
        best = d;
        labels[p] = c;
      }
    }
  }
  return labels;
}

/// Lloyd iterations from the given seeds until labels stop changing (at most `max_iterations`).
inline Clustering group_tasks_kmeans(std::span<const Position> points, std::size_t k, std::span<const Position> seeds,
                                     std::size_t max_iterations = 100) {
  if (k < 1) throw ValidationError("k-means needs k >= 1");
  if (seeds.size() != k) throw ValidationError("k-means needs exactly k seeds");
  Clustering out;
  out.centroids.assign(seeds.begin(), seeds.end());
  if (points.empty()) return out;
  out.labels = nearest_seed_assignment(points, out.centroids);
  for (out.iterations = 1; out.iterations <= max_iterations; ++out.iterations) {
    std::vector<Position> sum(k);
    std::vector<std::size_t> count(k, 0);
    for (std::size_t p = 0; p < points.size(); ++p) {
      auto& s = sum[out.labels[p]];
      s.x += points[p].x;
      s.y += points[p].y;
      s.h += points[p].h;
      ++count[out.labels[p]];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (count[c] == 0) continue;  // empty cluster keeps its centroid
      const double n = static_cast<double>(count[c]);
      out.centroids[c] = {sum[c].x / n, sum[c].y / n, sum[c].h / n};
    }
    auto next = nearest_seed_assignment(points, out.centroids);
    if (next == out.labels) break;
    out.labels = std::move(next);
  }
  out.iterations = std::min(out.iterations, max_iterations);
  return out;
}

/// Within-cluster sum of squares, measured against each cluster's mean.
inline double within_cluster_ss(std::span<const Position> points, std::span<const std::size_t> labels, std::size_t k) {
  std::vector<Position> mean(k);
  std::vector<std::size_t> count(k, 0);
  for (std::size_t p = 0; p < points.size(); ++p) {
    mean[labels[p]].x += points[p].x;
    mean[labels[p]].y += points[p].y;
    mean[labels[p]].h += points[p].h;
    ++count[labels[p]];
  }
  for (std::size_t c = 0; c < k; ++c)
    if (count[c] > 0) {
      const double n = static_cast<double>(count[c]);
      mean[c] = {mean[c].x / n, mean[c].y / n, mean[c].h / n};
    }
  double ss = 0.0;
  for (std::size_t p = 0; p < points.size(); ++p) ss += squared_distance(points[p], mean[labels[p]]);
  return ss;
}

}  // namespace agco
