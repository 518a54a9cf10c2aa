#include "synthlab/composite.hpp"

#include <algorithm>
#include <limits>

#include <json.hpp>

#include "synthlab/parallel.hpp"

namespace synthlab {

BackgroundCluster detect_background_cluster(const ClusterModel& cluster, const Volume3D& v) {
  if (!(cluster.assignments.dims() == v.dims()))
    throw Error(Errc::dims_mismatch, "cluster assignments and volume have different dims");
  const auto& assign = cluster.assignments.labels();
  const auto& data = v.data();
  const std::int64_t n = v.size();

  // Blocked min of cluster ids holding a zero-intensity voxel; min is
  // order-independent, so the merge is deterministic.
  const std::int64_t nblocks = (n + static_cast<std::int64_t>(par::kBlock) - 1) / static_cast<std::int64_t>(par::kBlock);
  std::vector<int> block_min(static_cast<std::size_t>(nblocks), std::numeric_limits<int>::max());
  par::parallel_for(nblocks, [&](std::int64_t b) {
    const std::int64_t lo = b * static_cast<std::int64_t>(par::kBlock);
    const std::int64_t hi = std::min<std::int64_t>(lo + static_cast<std::int64_t>(par::kBlock), n);
    int m = std::numeric_limits<int>::max();
    for (std::int64_t i = lo; i < hi; ++i) {
      if (data[static_cast<std::size_t>(i)] == 0.0f)
        m = std::min(m, static_cast<int>(assign[static_cast<std::size_t>(i)]));
    }
    block_min[static_cast<std::size_t>(b)] = m;
  });
  int b_id = std::numeric_limits<int>::max();
  for (int m : block_min) b_id = std::min(b_id, m);

  if (b_id != std::numeric_limits<int>::max()) return {b_id, false};
  // No exact-zero voxel: smallest centroid is cluster 0 by the ascending
  // relabeling contract.
  return {0, true};
}

CompositeTrace compose(const Volume3D& v, const MaskPair& masks, const ClusterModel& cluster) {
  if (!(v.dims() == masks.dims()))
    throw Error(Errc::dims_mismatch, "volume and masks have different dims");
  if (!(v.dims() == cluster.assignments.dims()))
    throw Error(Errc::dims_mismatch, "volume and cluster assignments have different dims");
  for (std::int32_t a : cluster.assignments.labels()) {
    if (a >= cluster.k)
      throw Error(Errc::label_out_of_range,
                  "cluster assignment " + std::to_string(a) + " >= k=" + std::to_string(cluster.k));
  }

  const auto bg = detect_background_cluster(cluster, v);
  const auto& assign = cluster.assignments.labels();
  const auto& endo = masks.endo();
  const auto& wall = masks.wall();
  const std::int64_t n = v.size();

  // Presence of each post-zeroing value: cluster ids outside the masks, plus
  // the zeroed value 0 wherever a mask voxel exists.
  const int k = cluster.k;
  std::vector<std::uint8_t> present(static_cast<std::size_t>(k) + 1, 0);  // [0] tracks the zeroed value
  {
    const std::int64_t nblocks = (n + static_cast<std::int64_t>(par::kBlock) - 1) / static_cast<std::int64_t>(par::kBlock);
    std::vector<std::uint8_t> block_present(static_cast<std::size_t>(nblocks) * (static_cast<std::size_t>(k) + 1), 0);
    par::parallel_for(nblocks, [&](std::int64_t b) {
      const std::int64_t lo = b * static_cast<std::int64_t>(par::kBlock);
      const std::int64_t hi = std::min<std::int64_t>(lo + static_cast<std::int64_t>(par::kBlock), n);
      std::uint8_t* p = &block_present[static_cast<std::size_t>(b) * (static_cast<std::size_t>(k) + 1)];
      for (std::int64_t i = lo; i < hi; ++i) {
        if (endo[static_cast<std::size_t>(i)] || wall[static_cast<std::size_t>(i)]) {
          p[0] = 1;
        } else {
          p[1 + static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])] = 1;
        }
      }
    });
    for (std::int64_t b = 0; b < nblocks; ++b) {
      const std::uint8_t* p = &block_present[static_cast<std::size_t>(b) * (static_cast<std::size_t>(k) + 1)];
      for (int c = 0; c <= k; ++c) present[static_cast<std::size_t>(c)] |= p[static_cast<std::size_t>(c)];
    }
  }

  CompositeTrace trace{bg.id, bg.fallback, {}, {}, LabelMap3D::zeros(v.dims(), v.spacing())};
  // U: sorted unique values of the zeroed cluster map. The zeroed value and
  // cluster id 0 coincide; record 0 once.
  if (present[0] || present[1]) trace.surviving.push_back(0);
  for (int c = 1; c < k; ++c)
    if (present[static_cast<std::size_t>(c) + 1]) trace.surviving.push_back(c);

  // Consecutive labels from 3 over surviving ids, skipping the background
  // cluster and the never-remapped 0.
  std::int32_t next = 3;
  for (std::int32_t u : trace.surviving) {
    if (u == 0 || u == bg.id) continue;
    trace.remap.emplace(u, next++);
  }

  std::vector<std::int32_t> lut(static_cast<std::size_t>(k), 0);
  for (const auto& [id, lab] : trace.remap) lut[static_cast<std::size_t>(id)] = lab;
  auto& final_labels = trace.final.mutable_labels();
  par::parallel_for(n, [&](std::int64_t i) {
    const auto idx = static_cast<std::size_t>(i);
    if (endo[idx]) {
      final_labels[idx] = 1;
    } else if (wall[idx]) {
      final_labels[idx] = 2;
    } else {
      final_labels[idx] = lut[static_cast<std::size_t>(assign[idx])];
    }
  });
  return trace;
}

std::string CompositeTrace::trace_json() const {
  nlohmann::json remap_json = nlohmann::json::object();
  for (const auto& [id, lab] : remap) remap_json[std::to_string(id)] = lab;
  nlohmann::json j = {
      {"b", background_cluster},
      {"U", surviving},
      {"remap", std::move(remap_json)},
      {"fallback_flag", fallback},
  };
  return j.dump(2) + "\n";
}

namespace {

std::string voxel_str(const Dims& d, std::int64_t idx) {
  const int x = static_cast<int>(idx % d.nx);
  const int y = static_cast<int>((idx / d.nx) % d.ny);
  const int z = static_cast<int>(idx / (static_cast<std::int64_t>(d.nx) * d.ny));
  return "(" + std::to_string(x) + "," + std::to_string(y) + "," + std::to_string(z) + ")";
}

}  // namespace

ValidationReport validate_composite(const CompositeTrace& trace, const MaskPair& masks) {
  ValidationReport report;
  const auto& labels = trace.final.labels();
  const Dims d = trace.final.dims();
  const std::int64_t n = trace.final.size();

  ValidationItem mask_item{"mask_labels", true, ""};
  if (!(d == masks.dims())) {
    mask_item.pass = false;
    mask_item.detail = "mask dims differ from label map dims";
  } else {
    for (std::int64_t i = 0; i < n && mask_item.pass; ++i) {
      const auto idx = static_cast<std::size_t>(i);
      if (masks.endo()[idx] && labels[idx] != 1) {
        mask_item.pass = false;
        mask_item.detail = "endo voxel " + voxel_str(d, i) + " carries label " + std::to_string(labels[idx]);
      } else if (masks.wall()[idx] && labels[idx] != 2) {
        mask_item.pass = false;
        mask_item.detail = "wall voxel " + voxel_str(d, i) + " carries label " + std::to_string(labels[idx]);
      }
    }
  }
  report.items.push_back(mask_item);

  // Allowed labels: {0,1,2} plus the remapped values; the background
  // cluster's id must not appear in the remap.
  ValidationItem excl_item{"background_excluded", true, ""};
  if (trace.remap.count(trace.background_cluster)) {
    excl_item.pass = false;
    excl_item.detail = "background cluster " + std::to_string(trace.background_cluster) + " was remapped";
  }
  std::vector<std::int32_t> allowed{0, 1, 2};
  for (const auto& [id, lab] : trace.remap) allowed.push_back(lab);
  std::sort(allowed.begin(), allowed.end());
  for (std::int64_t i = 0; i < n && excl_item.pass; ++i) {
    if (!std::binary_search(allowed.begin(), allowed.end(), labels[static_cast<std::size_t>(i)])) {
      excl_item.pass = false;
      excl_item.detail = "voxel " + voxel_str(d, i) + " carries unexpected label " +
                         std::to_string(labels[static_cast<std::size_t>(i)]);
    }
  }
  report.items.push_back(excl_item);

  // Contiguity: observed labels >= 3 must be consecutive starting at 3.
  ValidationItem contig_item{"label_contiguity", true, ""};
  const auto observed = trace.final.label_set();
  std::int32_t expect = 3;
  for (std::int32_t lab : observed) {
    if (lab < 3) continue;
    if (lab != expect) {
      report.warnings.push_back("label set has a gap: expected " + std::to_string(expect) + ", found " +
                                std::to_string(lab));
      contig_item.pass = false;
      contig_item.detail = report.warnings.back();
      break;
    }
    ++expect;
  }
  report.items.push_back(contig_item);

  for (const auto& item : report.items) report.all_pass = report.all_pass && item.pass;
  return report;
}

}  // namespace synthlab
