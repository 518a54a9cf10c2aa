#include "synthlab/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "synthlab/parallel.hpp"
#include "synthlab/rng.hpp"

namespace synthlab {

namespace detail {

int nearest_centroid(double value, std::span<const double> centroids) {
  int best = 0;
  double best_d = std::abs(value - centroids[0]);
  for (int c = 1; c < static_cast<int>(centroids.size()); ++c) {
    const double d = std::abs(value - centroids[static_cast<std::size_t>(c)]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

std::vector<double> kmeanspp_init(std::span<const float> values, int k, std::uint64_t seed) {
  const std::size_t n = values.size();
  SplitMix64 rng(seed);
  std::vector<double> centroids;
  centroids.reserve(static_cast<std::size_t>(k));
  centroids.push_back(values[rng.next_below(n)]);

  // Running min squared distance to the chosen set; updated serially so the
  // seeding is identical at any thread count.
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(values[i]) - centroids[0];
    d2[i] = d * d;
  }
  while (static_cast<int>(centroids.size()) < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += d2[i];
    if (!(total > 0.0))
      throw Error(Errc::too_few_distinct_values,
                  "k-means++ cannot place " + std::to_string(k) + " distinct centroids");
    const double r = rng.next_double() * total;
    double acc = 0.0;
    std::size_t pick = n;
    std::size_t last_positive = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (d2[i] > 0.0) last_positive = i;
      acc += d2[i];
      if (acc >= r && d2[i] > 0.0) {
        pick = i;
        break;
      }
    }
    // Roundoff can exhaust the walk with r ~ total; fall back to the last
    // point that is not already a centroid (total > 0 guarantees one).
    if (pick == n) pick = last_positive;
    const double c = values[pick];
    centroids.push_back(c);
    for (std::size_t i = 0; i < n; ++i) {
      const double d = static_cast<double>(values[i]) - c;
      d2[i] = std::min(d2[i], d * d);
    }
  }
  return centroids;
}

}  // namespace detail

namespace {

// True when at least `need` distinct values exist.
bool has_distinct(std::span<const float> values, int need) {
  std::unordered_set<float> seen;
  for (float v : values) {
    seen.insert(v);
    if (static_cast<int>(seen.size()) >= need) return true;
  }
  return false;
}

// Index of the point farthest from its assigned centroid (lowest index on
// ties), computed with a deterministic block merge.
std::int64_t farthest_point(std::span<const float> values, std::span<const std::int32_t> assign,
                            std::span<const double> centroids) {
  const std::int64_t n = static_cast<std::int64_t>(values.size());
  const std::int64_t nblocks = (n + static_cast<std::int64_t>(par::kBlock) - 1) / static_cast<std::int64_t>(par::kBlock);
  std::vector<double> best_d(static_cast<std::size_t>(nblocks), -1.0);
  std::vector<std::int64_t> best_i(static_cast<std::size_t>(nblocks), 0);
  par::parallel_for(nblocks, [&](std::int64_t b) {
    const std::int64_t lo = b * static_cast<std::int64_t>(par::kBlock);
    const std::int64_t hi = std::min<std::int64_t>(lo + static_cast<std::int64_t>(par::kBlock), n);
    double bd = -1.0;
    std::int64_t bi = lo;
    for (std::int64_t i = lo; i < hi; ++i) {
      const double d = std::abs(static_cast<double>(values[static_cast<std::size_t>(i)]) -
                                centroids[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])]);
      if (d > bd) {
        bd = d;
        bi = i;
      }
    }
    best_d[static_cast<std::size_t>(b)] = bd;
    best_i[static_cast<std::size_t>(b)] = bi;
  });
  double bd = -1.0;
  std::int64_t bi = 0;
  for (std::int64_t b = 0; b < nblocks; ++b) {
    if (best_d[static_cast<std::size_t>(b)] > bd) {
      bd = best_d[static_cast<std::size_t>(b)];
      bi = best_i[static_cast<std::size_t>(b)];
    }
  }
  return bi;
}

}  // namespace

ClusterModel kmeans(const Volume3D& v, int k, std::uint64_t seed, int max_iters, double tol) {
  if (k < 1) throw Error(Errc::invalid_argument, "kmeans: k must be >= 1");
  if (max_iters < 1) throw Error(Errc::invalid_argument, "kmeans: max_iters must be >= 1");
  const std::span<const float> values(v.data());
  const std::int64_t n = v.size();
  if (n < k) throw Error(Errc::too_few_distinct_values, "fewer voxels than clusters");
  if (!has_distinct(values, k))
    throw Error(Errc::too_few_distinct_values,
                "volume has fewer than " + std::to_string(k) + " distinct intensities");

  std::vector<double> centroids = detail::kmeanspp_init(values, k, seed);
  std::vector<std::int32_t> assign(static_cast<std::size_t>(n), 0);
  std::vector<double> trace;
  bool converged = false;
  bool reseeded_once = false;

  const auto assign_pass = [&]() -> double {
    par::parallel_for(n, [&](std::int64_t i) {
      assign[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(
          detail::nearest_centroid(values[static_cast<std::size_t>(i)], centroids));
    });
    return par::blocked_sum(n, [&](std::int64_t i) {
      const double d = static_cast<double>(values[static_cast<std::size_t>(i)]) -
                       centroids[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])];
      return d * d;
    });
  };

  for (int iter = 0; iter < max_iters; ++iter) {
    const double inertia = assign_pass();
    if (!trace.empty() && inertia > trace.back()) {
      // Floating-point wobble at convergence; keep the trace non-increasing.
      converged = true;
      break;
    }
    trace.push_back(inertia);
    if (trace.size() >= 2) {
      const double prev = trace[trace.size() - 2];
      if (std::abs(prev - inertia) / std::max(inertia, 1e-300) < tol) {
        converged = true;
        break;
      }
    }

    std::vector<double> sums;
    std::vector<std::int64_t> counts;
    par::blocked_bucket_sums(
        n, k, [&](std::int64_t i) { return static_cast<int>(assign[static_cast<std::size_t>(i)]); },
        [&](std::int64_t i) { return static_cast<double>(values[static_cast<std::size_t>(i)]); }, sums, counts);

    bool any_empty = false;
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        centroids[static_cast<std::size_t>(c)] =
            sums[static_cast<std::size_t>(c)] / static_cast<double>(counts[static_cast<std::size_t>(c)]);
      } else {
        any_empty = true;
      }
    }
    if (any_empty) {
      if (reseeded_once)
        throw Error(Errc::degenerate_clusters, "empty cluster persisted after one reseeding retry");
      reseeded_once = true;
      for (int c = 0; c < k; ++c) {
        if (counts[static_cast<std::size_t>(c)] == 0)
          centroids[static_cast<std::size_t>(c)] =
              values[static_cast<std::size_t>(farthest_point(values, assign, centroids))];
      }
    }
  }
  // Relabel ascending by centroid intensity, then assign once more so that
  // lowest-index tie breaking refers to the final centroid order.
  std::sort(centroids.begin(), centroids.end());
  for (int c = 0; c + 1 < k; ++c) {
    if (!(centroids[static_cast<std::size_t>(c)] < centroids[static_cast<std::size_t>(c + 1)]))
      throw Error(Errc::degenerate_clusters, "coincident centroids after convergence");
  }
  const double final_inertia = assign_pass();
  if (trace.empty() || final_inertia <= trace.back()) trace.push_back(final_inertia);

  ClusterModel model{
      k,
      std::move(centroids),
      LabelMap3D(v.dims(), v.spacing(), std::move(assign)),
      final_inertia,
      std::move(trace),
      converged,
  };
  return model;
}

}  // namespace synthlab
