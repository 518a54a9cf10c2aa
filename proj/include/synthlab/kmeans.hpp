#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "synthlab/volume.hpp"

namespace synthlab {

// Result of intensity-based k-means. Centroids are relabeled ascending by
// intensity before return, so cluster 0 is always the darkest tissue class.
struct ClusterModel {
  int k = 0;
  std::vector<double> centroids;      // strictly ascending
  LabelMap3D assignments;             // values in [0, k)
  double inertia = 0.0;               // sum of squared distances, final state
  std::vector<double> inertia_trace;  // per-iteration objective, non-increasing
  bool converged = false;             // false when max_iters was exhausted
};

inline constexpr int kKmeansDefaultMaxIters = 300;
inline constexpr double kKmeansDefaultTol = 1e-4;  // relative inertia change

// 1-D k-means over voxel intensities with k-means++ seeding. Deterministic
// for a fixed seed at any thread count. Equidistant points take the
// lowest-index centroid. An empty cluster is reseeded at the point farthest
// from its assigned centroid; a second empty cluster after that is an error.
ClusterModel kmeans(const Volume3D& v, int k, std::uint64_t seed,
                    int max_iters = kKmeansDefaultMaxIters, double tol = kKmeansDefaultTol);

namespace detail {
// k-means++ initial centroids, shared by the parallel and serial paths.
std::vector<double> kmeanspp_init(std::span<const float> values, int k, std::uint64_t seed);
// Nearest centroid with lowest-index tie breaking.
int nearest_centroid(double value, std::span<const double> centroids);
}  // namespace detail

}  // namespace synthlab
