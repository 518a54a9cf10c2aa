#include "synthlab/cluster_metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>

#include <json.hpp>

#include "synthlab/parallel.hpp"
#include "synthlab/rng.hpp"

namespace synthlab {

namespace {

// Shortest round-trip decimal rendering, shared by CSV and JSON paths.
std::string fmt_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::vector<std::size_t> subsample_indices(std::size_t n, std::size_t cap, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  if (n <= cap) return idx;
  SplitMix64 rng(seed);
  for (std::size_t i = 0; i < cap; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.next_below(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(cap);
  std::sort(idx.begin(), idx.end());
  return idx;
}

// Remaps arbitrary label ids to dense [0, k) and counts members.
struct DenseClusters {
  std::vector<std::int32_t> label_of;   // dense id -> original label
  std::vector<std::int32_t> dense;      // per point
  std::vector<std::int64_t> counts;
  int k = 0;
};

DenseClusters densify(std::span<const std::int32_t> assignments, const std::vector<std::size_t>& idx) {
  DenseClusters dc;
  std::map<std::int32_t, std::int32_t> ids;
  dc.dense.resize(idx.size());
  for (std::size_t p = 0; p < idx.size(); ++p) {
    const std::int32_t lab = assignments[idx[p]];
    auto [it, inserted] = ids.emplace(lab, static_cast<std::int32_t>(ids.size()));
    dc.dense[p] = it->second;
  }
  dc.k = static_cast<int>(ids.size());
  dc.label_of.resize(static_cast<std::size_t>(dc.k));
  for (const auto& [lab, d] : ids) dc.label_of[static_cast<std::size_t>(d)] = lab;
  dc.counts.assign(static_cast<std::size_t>(dc.k), 0);
  for (std::int32_t d : dc.dense) dc.counts[static_cast<std::size_t>(d)] += 1;
  return dc;
}

}  // namespace

double silhouette_score(std::span<const float> values, std::span<const std::int32_t> assignments,
                        std::size_t sample_cap, std::uint64_t seed) {
  if (values.size() != assignments.size())
    throw Error(Errc::dims_mismatch, "silhouette: values and assignments differ in length");
  if (values.empty()) throw Error(Errc::invalid_argument, "silhouette: empty input");
  if (sample_cap < 2) throw Error(Errc::invalid_argument, "silhouette: sample_cap must be >= 2");

  const auto idx = subsample_indices(values.size(), sample_cap, seed);
  const auto dc = densify(assignments, idx);
  if (dc.k < 2) throw Error(Errc::single_cluster, "silhouette requires >= 2 clusters among sampled points");

  const std::size_t s = idx.size();
  std::vector<double> vals(s);
  for (std::size_t p = 0; p < s; ++p) vals[p] = values[idx[p]];

  const double mean_s = par::blocked_sum(static_cast<std::int64_t>(s), [&](std::int64_t pi) {
    const std::size_t p = static_cast<std::size_t>(pi);
    const std::int32_t own = dc.dense[p];
    // Sum of distances from p to every cluster.
    std::vector<double> dist_sum(static_cast<std::size_t>(dc.k), 0.0);
    for (std::size_t q = 0; q < s; ++q)
      dist_sum[static_cast<std::size_t>(dc.dense[q])] += std::abs(vals[p] - vals[q]);
    const std::int64_t own_count = dc.counts[static_cast<std::size_t>(own)];
    if (own_count <= 1) return 0.0;  // singleton convention
    const double a = dist_sum[static_cast<std::size_t>(own)] / static_cast<double>(own_count - 1);
    double b = std::numeric_limits<double>::infinity();
    for (int c = 0; c < dc.k; ++c) {
      if (c == own) continue;
      b = std::min(b, dist_sum[static_cast<std::size_t>(c)] / static_cast<double>(dc.counts[static_cast<std::size_t>(c)]));
    }
    const double m = std::max(a, b);
    if (m == 0.0) return 0.0;  // 0/0 convention
    return (b - a) / m;
  });
  return mean_s / static_cast<double>(s);
}

double davies_bouldin(std::span<const float> values, std::span<const std::int32_t> assignments) {
  if (values.size() != assignments.size())
    throw Error(Errc::dims_mismatch, "davies_bouldin: values and assignments differ in length");
  if (values.empty()) throw Error(Errc::invalid_argument, "davies_bouldin: empty input");

  std::vector<std::size_t> all(values.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const auto dc = densify(assignments, all);
  if (dc.k < 2) throw Error(Errc::single_cluster, "DBI requires >= 2 non-empty clusters");

  const std::int64_t n = static_cast<std::int64_t>(values.size());
  std::vector<double> sums, scatter(static_cast<std::size_t>(dc.k));
  std::vector<std::int64_t> counts;
  par::blocked_bucket_sums(
      n, dc.k, [&](std::int64_t i) { return static_cast<int>(dc.dense[static_cast<std::size_t>(i)]); },
      [&](std::int64_t i) { return static_cast<double>(values[static_cast<std::size_t>(i)]); }, sums, counts);
  std::vector<double> centroid(static_cast<std::size_t>(dc.k));
  for (int c = 0; c < dc.k; ++c)
    centroid[static_cast<std::size_t>(c)] = sums[static_cast<std::size_t>(c)] / static_cast<double>(counts[static_cast<std::size_t>(c)]);

  std::vector<double> abs_sums;
  std::vector<std::int64_t> unused;
  par::blocked_bucket_sums(
      n, dc.k, [&](std::int64_t i) { return static_cast<int>(dc.dense[static_cast<std::size_t>(i)]); },
      [&](std::int64_t i) {
        const int c = dc.dense[static_cast<std::size_t>(i)];
        return std::abs(static_cast<double>(values[static_cast<std::size_t>(i)]) - centroid[static_cast<std::size_t>(c)]);
      },
      abs_sums, unused);
  for (int c = 0; c < dc.k; ++c)
    scatter[static_cast<std::size_t>(c)] = abs_sums[static_cast<std::size_t>(c)] / static_cast<double>(counts[static_cast<std::size_t>(c)]);

  double total = 0.0;
  for (int i = 0; i < dc.k; ++i) {
    double worst = 0.0;
    for (int j = 0; j < dc.k; ++j) {
      if (i == j) continue;
      const double d = std::abs(centroid[static_cast<std::size_t>(i)] - centroid[static_cast<std::size_t>(j)]);
      if (d == 0.0)
        throw Error(Errc::coincident_centroids,
                    "clusters " + std::to_string(dc.label_of[static_cast<std::size_t>(i)]) + " and " +
                        std::to_string(dc.label_of[static_cast<std::size_t>(j)]) + " share a centroid");
      worst = std::max(worst, (scatter[static_cast<std::size_t>(i)] + scatter[static_cast<std::size_t>(j)]) / d);
    }
    total += worst;
  }
  return total / static_cast<double>(dc.k);
}

KSweepReport sweep_k(const Volume3D& v, int k_min, int k_max, std::uint64_t seed, std::size_t sample_cap) {
  if (k_min < 2) throw Error(Errc::invalid_argument, "sweep_k: k_min must be >= 2");
  if (k_max < k_min) throw Error(Errc::invalid_range, "sweep_k: k_max must be >= k_min");
  KSweepReport report;
  report.sample_cap = sample_cap;
  for (int k = k_min; k <= k_max; ++k) {
    KSweepRow row;
    row.k = k;
    try {
      // Per-k derived seed keeps rows independent but reproducible.
      const ClusterModel model = kmeans(v, k, seed ^ static_cast<std::uint64_t>(k));
      row.inertia = model.inertia;
      row.silhouette = silhouette_score(v.data(), model.assignments.labels(), sample_cap, seed);
      row.dbi = davies_bouldin(v.data(), model.assignments.labels());
    } catch (const Error& e) {
      row.failed = true;
      row.message = e.what();
      row.silhouette = std::numeric_limits<double>::quiet_NaN();
      row.dbi = std::numeric_limits<double>::quiet_NaN();
      row.inertia = std::numeric_limits<double>::quiet_NaN();
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string KSweepReport::to_csv() const {
  std::string out = "k,silhouette,dbi,inertia\n";
  for (const auto& r : rows) {
    out += std::to_string(r.k);
    out += ',';
    out += r.failed ? "nan" : fmt_double(r.silhouette);
    out += ',';
    out += r.failed ? "nan" : fmt_double(r.dbi);
    out += ',';
    out += r.failed ? "nan" : fmt_double(r.inertia);
    out += '\n';
  }
  return out;
}

std::string KSweepReport::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json jr = {{"k", r.k}};
    if (r.failed) {
      jr["failed"] = r.message;
      jr["silhouette"] = nullptr;
      jr["dbi"] = nullptr;
      jr["inertia"] = nullptr;
    } else {
      jr["silhouette"] = r.silhouette;
      jr["dbi"] = r.dbi;
      jr["inertia"] = r.inertia;
    }
    rows_json.push_back(std::move(jr));
  }
  nlohmann::json j = {{"sample_cap", sample_cap}, {"rows", std::move(rows_json)}};
  return j.dump(2) + "\n";
}

}  // namespace synthlab
