#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace synthlab::par {

// Fixed block size for deterministic reductions. Each block is accumulated
// serially in index order and block partials are merged in ascending block
// index, so the result is bit-identical for any thread count. Inputs shorter
// than one block reduce in plain left-to-right order.
inline constexpr std::size_t kBlock = 4096;

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

// Parallel map over [0, n). body(i) must touch only state owned by index i.
template <class F>
void parallel_for(std::int64_t n, F&& body) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::int64_t i = 0; i < n; ++i) body(i);
}

// Deterministic blocked sum of term(i) for i in [0, n).
template <class F>
double blocked_sum(std::int64_t n, F&& term) {
  if (n <= 0) return 0.0;
  const std::int64_t nblocks = (n + static_cast<std::int64_t>(kBlock) - 1) / static_cast<std::int64_t>(kBlock);
  std::vector<double> partial(static_cast<std::size_t>(nblocks), 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::int64_t b = 0; b < nblocks; ++b) {
    const std::int64_t lo = b * static_cast<std::int64_t>(kBlock);
    const std::int64_t hi = std::min<std::int64_t>(lo + static_cast<std::int64_t>(kBlock), n);
    double s = 0.0;
    for (std::int64_t i = lo; i < hi; ++i) s += term(i);
    partial[static_cast<std::size_t>(b)] = s;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

// Deterministic blocked accumulation into k per-bucket sums and counts.
// bucket(i) must return a value in [0, k); value(i) is added to its bucket.
template <class B, class V>
void blocked_bucket_sums(std::int64_t n, int k, B&& bucket, V&& value,
                         std::vector<double>& sums, std::vector<std::int64_t>& counts) {
  sums.assign(static_cast<std::size_t>(k), 0.0);
  counts.assign(static_cast<std::size_t>(k), 0);
  if (n <= 0) return;
  const std::int64_t nblocks = (n + static_cast<std::int64_t>(kBlock) - 1) / static_cast<std::int64_t>(kBlock);
  std::vector<double> psum(static_cast<std::size_t>(nblocks * k), 0.0);
  std::vector<std::int64_t> pcnt(static_cast<std::size_t>(nblocks * k), 0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::int64_t b = 0; b < nblocks; ++b) {
    const std::int64_t lo = b * static_cast<std::int64_t>(kBlock);
    const std::int64_t hi = std::min<std::int64_t>(lo + static_cast<std::int64_t>(kBlock), n);
    double* s = &psum[static_cast<std::size_t>(b * k)];
    std::int64_t* c = &pcnt[static_cast<std::size_t>(b * k)];
    for (std::int64_t i = lo; i < hi; ++i) {
      const int q = bucket(i);
      s[q] += value(i);
      c[q] += 1;
    }
  }
  for (std::int64_t b = 0; b < nblocks; ++b) {
    for (int q = 0; q < k; ++q) {
      sums[static_cast<std::size_t>(q)] += psum[static_cast<std::size_t>(b * k + q)];
      counts[static_cast<std::size_t>(q)] += pcnt[static_cast<std::size_t>(b * k + q)];
    }
  }
}

}  // namespace synthlab::par
