#include "synthlab/mmd.hpp"

#include <cmath>

#include "synthlab/parallel.hpp"

namespace synthlab {

namespace {

double kernel_eval(std::span<const double> a, std::span<const double> b, MmdKernel kernel, double gamma) {
  if (kernel == MmdKernel::dot) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
  }
  double dist2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    dist2 += d * d;
  }
  return std::exp(-gamma * dist2);
}

// Off-diagonal kernel sum within one set; per-row partials merged in row
// order, so small inputs reproduce a sequential double loop bit-for-bit.
double within_sum(const FeatureSet& s, MmdKernel kernel, double gamma) {
  std::vector<double> row_sums(static_cast<std::size_t>(s.n), 0.0);
  par::parallel_for(s.n, [&](std::int64_t i) {
    double acc = 0.0;
    for (std::int64_t j = 0; j < s.n; ++j) {
      if (i == j) continue;
      acc += kernel_eval(s.row(i), s.row(j), kernel, gamma);
    }
    row_sums[static_cast<std::size_t>(i)] = acc;
  });
  double total = 0.0;
  for (double v : row_sums) total += v;
  return total;
}

double cross_sum(const FeatureSet& x, const FeatureSet& y, MmdKernel kernel, double gamma) {
  std::vector<double> row_sums(static_cast<std::size_t>(x.n), 0.0);
  par::parallel_for(x.n, [&](std::int64_t i) {
    double acc = 0.0;
    for (std::int64_t j = 0; j < y.n; ++j) acc += kernel_eval(x.row(i), y.row(j), kernel, gamma);
    row_sums[static_cast<std::size_t>(i)] = acc;
  });
  double total = 0.0;
  for (double v : row_sums) total += v;
  return total;
}

}  // namespace

double mmd2(const FeatureSet& x, const FeatureSet& y, MmdKernel kernel, double gamma) {
  if (x.d != y.d)
    throw Error(Errc::dimension_mismatch,
                "mmd2: feature dims " + std::to_string(x.d) + " vs " + std::to_string(y.d));
  if (x.n < 2 || y.n < 2)
    throw Error(Errc::too_few_samples, "mmd2: both sets need at least 2 rows for the unbiased estimator");
  if (kernel == MmdKernel::rbf && !(gamma > 0.0))
    throw Error(Errc::invalid_argument, "mmd2: rbf gamma must be positive");

  const double nx = static_cast<double>(x.n);
  const double ny = static_cast<double>(y.n);
  const double xx = within_sum(x, kernel, gamma) / (nx * (nx - 1.0));
  const double yy = within_sum(y, kernel, gamma) / (ny * (ny - 1.0));
  const double xy = 2.0 * cross_sum(x, y, kernel, gamma) / (nx * ny);
  return xx + yy - xy;
}

}  // namespace synthlab
