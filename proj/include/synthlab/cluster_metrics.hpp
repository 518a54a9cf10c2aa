#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "synthlab/kmeans.hpp"

namespace synthlab {

inline constexpr std::size_t kSilhouetteDefaultCap = 10000;

// Mean per-point silhouette (b - a) / max(a, b). Points whose cluster is a
// singleton contribute 0, as does the 0/0 case. When more than sample_cap
// points are given, a seed-controlled subsample is scored instead.
double silhouette_score(std::span<const float> values, std::span<const std::int32_t> assignments,
                        std::size_t sample_cap = kSilhouetteDefaultCap, std::uint64_t seed = 0);

// Davies-Bouldin index: mean over clusters of the worst
// (scatter_i + scatter_j) / |centroid_i - centroid_j| ratio.
double davies_bouldin(std::span<const float> values, std::span<const std::int32_t> assignments);

struct KSweepRow {
  int k = 0;
  double silhouette = 0.0;
  double dbi = 0.0;
  double inertia = 0.0;
  bool failed = false;
  std::string message;  // failure reason when failed
};

struct KSweepReport {
  std::vector<KSweepRow> rows;
  std::size_t sample_cap = kSilhouetteDefaultCap;  // silhouette subsample size used

  std::string to_csv() const;   // columns: k,silhouette,dbi,inertia
  std::string to_json() const;
};

// Runs kmeans for each k in [k_min, k_max] on the given volume (callers
// smooth beforehand; this function does not preprocess). Per-k failures are
// recorded in the row rather than thrown.
KSweepReport sweep_k(const Volume3D& v, int k_min, int k_max, std::uint64_t seed,
                     std::size_t sample_cap = kSilhouetteDefaultCap);

}  // namespace synthlab
