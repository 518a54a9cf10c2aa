#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "synthlab/kmeans.hpp"
#include "synthlab/volume.hpp"

namespace synthlab {

// Output of composite label-map construction. Final label semantics:
// 0 = background, 1 = endocardium, 2 = wall, >= 3 = context clusters.
struct CompositeTrace {
  int background_cluster = 0;                // b
  bool fallback = false;                     // no zero-intensity voxel existed
  std::vector<std::int32_t> surviving;       // U: sorted unique post-zeroing ids
  std::map<std::int32_t, std::int32_t> remap;  // cluster id -> final label >= 3
  LabelMap3D final;

  std::string trace_json() const;  // {b, U, remap, fallback_flag}
};

struct BackgroundCluster {
  int id = 0;
  bool fallback = false;
};

// Minimum cluster id containing at least one voxel with intensity exactly 0.
// Falls back to the cluster with the smallest centroid when no such voxel
// exists (flagged).
BackgroundCluster detect_background_cluster(const ClusterModel& cluster, const Volume3D& v);

// Fuses expert masks with cluster labels: cluster labels under either mask
// are zeroed, the background cluster is excluded, and the remaining cluster
// ids are renumbered consecutively from 3 in ascending id order. The zeroed
// value 0 coincides with background and is never remapped.
CompositeTrace compose(const Volume3D& v, const MaskPair& masks, const ClusterModel& cluster);

struct ValidationItem {
  std::string name;
  bool pass = true;
  std::string detail;  // counterexample voxel or explanation
};

struct ValidationReport {
  std::vector<ValidationItem> items;
  std::vector<std::string> warnings;  // non-fatal, e.g. label-set gaps
  bool all_pass = true;
};

// Report-only re-check of the CompositeTrace invariants.
ValidationReport validate_composite(const CompositeTrace& trace, const MaskPair& masks);

}  // namespace synthlab
