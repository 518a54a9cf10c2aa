#include "synthlab/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "synthlab/parallel.hpp"

namespace synthlab {

double psnr(const Volume3D& a, const Volume3D& b, double dynamic_range) {
  if (!(a.dims() == b.dims())) throw Error(Errc::dims_mismatch, "psnr: volumes have different dims");
  if (!(dynamic_range > 0.0)) throw Error(Errc::invalid_argument, "psnr: dynamic range must be positive");
  const std::int64_t n = a.size();
  const double mse = par::blocked_sum(n, [&](std::int64_t i) {
                       const double d = static_cast<double>(a.data()[static_cast<std::size_t>(i)]) -
                                        static_cast<double>(b.data()[static_cast<std::size_t>(i)]);
                       return d * d;
                     }) /
                     static_cast<double>(n);
  if (mse == 0.0) throw Error(Errc::zero_mse, "volumes are identical; PSNR is unbounded");
  return 10.0 * std::log10(dynamic_range * dynamic_range / mse);
}

namespace msssim_detail {

struct Field {
  Dims dims;
  std::vector<float> data;
};

std::vector<double> gaussian_window(int size, double sigma) {
  std::vector<double> w(static_cast<std::size_t>(size));
  const double c = 0.5 * (size - 1);
  double total = 0.0;
  for (int i = 0; i < size; ++i) {
    w[static_cast<std::size_t>(i)] = std::exp(-0.5 * (i - c) * (i - c) / (sigma * sigma));
    total += w[static_cast<std::size_t>(i)];
  }
  for (double& v : w) v /= total;
  return w;
}

// Valid-region separable convolution along one axis: output extent shrinks by
// window-1 along that axis.
Field filter_axis(const Field& in, int axis, const std::vector<double>& w) {
  const int win = static_cast<int>(w.size());
  Field out;
  out.dims = in.dims;
  (axis == 0 ? out.dims.nx : axis == 1 ? out.dims.ny : out.dims.nz) -= win - 1;
  out.data.resize(static_cast<std::size_t>(out.dims.count()));
  const std::int64_t stride =
      axis == 0 ? 1 : (axis == 1 ? in.dims.nx : static_cast<std::int64_t>(in.dims.nx) * in.dims.ny);
  par::parallel_for(out.dims.count(), [&](std::int64_t idx) {
    const int x = static_cast<int>(idx % out.dims.nx);
    const int y = static_cast<int>((idx / out.dims.nx) % out.dims.ny);
    const int z = static_cast<int>(idx / (static_cast<std::int64_t>(out.dims.nx) * out.dims.ny));
    const std::int64_t src0 = static_cast<std::int64_t>(x) +
                              static_cast<std::int64_t>(in.dims.nx) *
                                  (static_cast<std::int64_t>(y) + static_cast<std::int64_t>(in.dims.ny) * z);
    double acc = 0.0;
    for (int t = 0; t < win; ++t) acc += w[static_cast<std::size_t>(t)] * in.data[static_cast<std::size_t>(src0 + t * stride)];
    out.data[static_cast<std::size_t>(idx)] = static_cast<float>(acc);
  });
  return out;
}

Field filter_valid(const Field& in, const std::vector<double>& w) {
  Field f = filter_axis(in, 0, w);
  f = filter_axis(f, 1, w);
  f = filter_axis(f, 2, w);
  return f;
}

Field downsample2(const Field& in) {
  Field out;
  out.dims = {std::max(1, in.dims.nx / 2), std::max(1, in.dims.ny / 2), std::max(1, in.dims.nz / 2)};
  out.data.resize(static_cast<std::size_t>(out.dims.count()));
  par::parallel_for(out.dims.count(), [&](std::int64_t idx) {
    const int x = static_cast<int>(idx % out.dims.nx);
    const int y = static_cast<int>((idx / out.dims.nx) % out.dims.ny);
    const int z = static_cast<int>(idx / (static_cast<std::int64_t>(out.dims.nx) * out.dims.ny));
    double acc = 0.0;
    int cnt = 0;
    for (int dz = 0; dz < 2; ++dz)
      for (int dy = 0; dy < 2; ++dy)
        for (int dx = 0; dx < 2; ++dx) {
          const int sx = 2 * x + dx, sy = 2 * y + dy, sz = 2 * z + dz;
          if (sx < in.dims.nx && sy < in.dims.ny && sz < in.dims.nz) {
            acc += in.data[static_cast<std::size_t>(
                sx + static_cast<std::int64_t>(in.dims.nx) * (sy + static_cast<std::int64_t>(in.dims.ny) * sz))];
            ++cnt;
          }
        }
    out.data[static_cast<std::size_t>(idx)] = static_cast<float>(acc / cnt);
  });
  return out;
}

Field elementwise_product(const Field& a, const Field& b) {
  Field out;
  out.dims = a.dims;
  out.data.resize(a.data.size());
  par::parallel_for(static_cast<std::int64_t>(a.data.size()), [&](std::int64_t i) {
    out.data[static_cast<std::size_t>(i)] = a.data[static_cast<std::size_t>(i)] * b.data[static_cast<std::size_t>(i)];
  });
  return out;
}

WindowStats window_stats_at(const Field& mx, const Field& my, const Field& mxx, const Field& myy,
                            const Field& mxy, std::size_t i) {
  WindowStats s;
  s.mu_x = mx.data[i];
  s.mu_y = my.data[i];
  s.var_x = std::max(0.0, static_cast<double>(mxx.data[i]) - s.mu_x * s.mu_x);
  s.var_y = std::max(0.0, static_cast<double>(myy.data[i]) - s.mu_y * s.mu_y);
  // Cancellation can leave the raw moments violating Cauchy-Schwarz on
  // near-constant windows; keep the correlation within [-1, 1].
  const double bound = std::sqrt(s.var_x * s.var_y);
  s.cov_xy = std::clamp(static_cast<double>(mxy.data[i]) - s.mu_x * s.mu_y, -bound, bound);
  return s;
}

struct ScaleMeans {
  double cs = 0.0;    // mean contrast-structure term
  double ssim = 0.0;  // mean full SSIM term
};

ScaleMeans scale_means(const Field& x, const Field& y, const MsSsimConfig& cfg) {
  const auto w = gaussian_window(cfg.window, cfg.window_sigma);
  const Field mx = filter_valid(x, w);
  const Field my = filter_valid(y, w);
  const Field mxx = filter_valid(elementwise_product(x, x), w);
  const Field myy = filter_valid(elementwise_product(y, y), w);
  const Field mxy = filter_valid(elementwise_product(x, y), w);

  const double c1 = (cfg.k1 * cfg.dynamic_range) * (cfg.k1 * cfg.dynamic_range);
  const double c2 = (cfg.k2 * cfg.dynamic_range) * (cfg.k2 * cfg.dynamic_range);
  const std::int64_t n = mx.dims.count();
  ScaleMeans means;
  means.cs = par::blocked_sum(n, [&](std::int64_t i) {
               const WindowStats s = window_stats_at(mx, my, mxx, myy, mxy, static_cast<std::size_t>(i));
               return (2.0 * s.cov_xy + c2) / (s.var_x + s.var_y + c2);
             }) /
             static_cast<double>(n);
  means.ssim = par::blocked_sum(n, [&](std::int64_t i) {
                 const WindowStats s = window_stats_at(mx, my, mxx, myy, mxy, static_cast<std::size_t>(i));
                 const double lum = (2.0 * s.mu_x * s.mu_y + c1) / (s.mu_x * s.mu_x + s.mu_y * s.mu_y + c1);
                 const double cs = (2.0 * s.cov_xy + c2) / (s.var_x + s.var_y + c2);
                 return lum * cs;
               }) /
               static_cast<double>(n);
  return means;
}

}  // namespace msssim_detail

double ms_ssim(const Volume3D& a, const Volume3D& b, const MsSsimConfig& cfg) {
  if (!(a.dims() == b.dims())) throw Error(Errc::dims_mismatch, "ms_ssim: volumes have different dims");
  const int scales = cfg.scales();
  if (scales < 1) throw Error(Errc::invalid_argument, "ms_ssim: need at least one scale weight");
  if (cfg.window < 2) throw Error(Errc::invalid_argument, "ms_ssim: window must be >= 2");
  for (double w : cfg.weights)
    if (!(w > 0.0)) throw Error(Errc::invalid_argument, "ms_ssim: weights must be positive");
  if (!(cfg.dynamic_range > 0.0)) throw Error(Errc::invalid_argument, "ms_ssim: dynamic range must be positive");

  // Every scale must keep each axis at or above the window size.
  {
    Dims d = a.dims();
    for (int s = 0; s < scales; ++s) {
      if (s > 0) d = {std::max(1, d.nx / 2), std::max(1, d.ny / 2), std::max(1, d.nz / 2)};
      const int axes[3] = {d.nx, d.ny, d.nz};
      for (int ax = 0; ax < 3; ++ax) {
        if (axes[ax] < cfg.window)
          throw Error(Errc::volume_too_small,
                      std::string("ms_ssim: axis ") + "xyz"[ax] + " is " + std::to_string(axes[ax]) +
                          " at scale " + std::to_string(s + 1) + ", window needs " + std::to_string(cfg.window));
      }
    }
  }

  std::vector<double> weights = cfg.weights;
  if (cfg.renormalize_weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    for (double& w : weights) w /= total;
  }

  msssim_detail::Field x{a.dims(), a.data()};
  msssim_detail::Field y{b.dims(), b.data()};
  double result = 1.0;
  for (int s = 0; s < scales; ++s) {
    if (s > 0) {
      x = msssim_detail::downsample2(x);
      y = msssim_detail::downsample2(y);
    }
    const auto means = msssim_detail::scale_means(x, y, cfg);
    const bool coarsest = (s == scales - 1);
    // Negative averaged terms cannot be exponentiated; clamp at zero.
    const double base = std::max(0.0, coarsest ? means.ssim : means.cs);
    result *= std::pow(base, weights[static_cast<std::size_t>(s)]);
  }
  return result;
}

}  // namespace synthlab
