#include "synthlab/smooth.hpp"

#include <cmath>

#include "synthlab/parallel.hpp"

namespace synthlab {

namespace detail {

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> w(static_cast<std::size_t>(2 * radius + 1));
  double total = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-0.5 * (static_cast<double>(i) * i) / (sigma * sigma));
    w[static_cast<std::size_t>(i + radius)] = v;
    total += v;
  }
  for (double& v : w) v /= total;
  return w;
}

// Symmetric reflection with the edge sample repeated: -1 -> 0, n -> n-1.
inline int reflect(int i, int n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - 1 - i;
  }
  return i;
}

// One separable pass along `axis`; each output voxel is an independent
// fixed-order tap sum, so the result does not depend on thread count.
void smooth_axis(const std::vector<float>& in, std::vector<float>& out, Dims d, int axis,
                 const std::vector<double>& w) {
  const int radius = static_cast<int>(w.size() / 2);
  const int n_axis = axis == 0 ? d.nx : (axis == 1 ? d.ny : d.nz);
  const std::int64_t stride =
      axis == 0 ? 1 : (axis == 1 ? d.nx : static_cast<std::int64_t>(d.nx) * d.ny);
  par::parallel_for(d.count(), [&](std::int64_t idx) {
    const int x = static_cast<int>(idx % d.nx);
    const int y = static_cast<int>((idx / d.nx) % d.ny);
    const int z = static_cast<int>(idx / (static_cast<std::int64_t>(d.nx) * d.ny));
    const int c = axis == 0 ? x : (axis == 1 ? y : z);
    const std::int64_t base = idx - static_cast<std::int64_t>(c) * stride;
    double acc = 0.0;
    for (int t = -radius; t <= radius; ++t) {
      const int src = reflect(c + t, n_axis);
      acc += w[static_cast<std::size_t>(t + radius)] * in[static_cast<std::size_t>(base + src * stride)];
    }
    out[static_cast<std::size_t>(idx)] = static_cast<float>(acc);
  });
}

}  // namespace detail

Volume3D gaussian_smooth(const Volume3D& v, double sigma) {
  if (sigma < 0.0) throw Error(Errc::invalid_argument, "gaussian_smooth: sigma must be >= 0");
  if (sigma == 0.0) return v;
  const auto w = detail::gaussian_kernel(sigma);
  std::vector<float> a = v.data();
  std::vector<float> b(a.size());
  detail::smooth_axis(a, b, v.dims(), 0, w);
  detail::smooth_axis(b, a, v.dims(), 1, w);
  detail::smooth_axis(a, b, v.dims(), 2, w);
  return Volume3D(v.dims(), v.spacing(), std::move(b));
}

}  // namespace synthlab
