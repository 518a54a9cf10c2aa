#include "synthlab/serial_ref.hpp"

#include <algorithm>
#include <cmath>

namespace synthlab::serial {

namespace {

// Mirrors the kernel in smooth.cpp.
int reflect(int i, int n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - 1 - i;
  }
  return i;
}

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

void smooth_axis(const std::vector<float>& in, std::vector<float>& out, Dims d, int axis,
                 const std::vector<double>& w) {
  const int radius = static_cast<int>(w.size() / 2);
  const int n_axis = axis == 0 ? d.nx : (axis == 1 ? d.ny : d.nz);
  const std::int64_t stride = axis == 0 ? 1 : (axis == 1 ? d.nx : static_cast<std::int64_t>(d.nx) * d.ny);
  for (std::int64_t idx = 0; idx < d.count(); ++idx) {
    const int x = static_cast<int>(idx % d.nx);
    const int y = static_cast<int>((idx / d.nx) % d.ny);
    const int z = static_cast<int>(idx / (static_cast<std::int64_t>(d.nx) * d.ny));
    const int c = axis == 0 ? x : (axis == 1 ? y : z);
    const std::int64_t base = idx - static_cast<std::int64_t>(c) * stride;
    double acc = 0.0;
    for (int t = -radius; t <= radius; ++t)
      acc += w[static_cast<std::size_t>(t + radius)] *
             in[static_cast<std::size_t>(base + reflect(c + t, n_axis) * stride)];
    out[static_cast<std::size_t>(idx)] = static_cast<float>(acc);
  }
}

double source_coord(int i, int n_src, int n_tgt) {
  return (static_cast<double>(i) + 0.5) * static_cast<double>(n_src) / static_cast<double>(n_tgt) - 0.5;
}

}  // namespace

Volume3D gaussian_smooth(const Volume3D& v, double sigma) {
  if (sigma < 0.0) throw Error(Errc::invalid_argument, "gaussian_smooth: sigma must be >= 0");
  if (sigma == 0.0) return v;
  const auto w = gaussian_kernel(sigma);
  std::vector<float> a = v.data();
  std::vector<float> b(a.size());
  smooth_axis(a, b, v.dims(), 0, w);
  smooth_axis(b, a, v.dims(), 1, w);
  smooth_axis(a, b, v.dims(), 2, w);
  return Volume3D(v.dims(), v.spacing(), std::move(b));
}

Volume3D resample(const Volume3D& v, Dims target_dims, Spacing target_spacing, Interp interp) {
  if (target_dims == v.dims()) return Volume3D(v.dims(), target_spacing, v.data());
  const Dims sd = v.dims();
  std::vector<float> out(static_cast<std::size_t>(target_dims.count()));
  for (std::int64_t idx = 0; idx < target_dims.count(); ++idx) {
    const int x = static_cast<int>(idx % target_dims.nx);
    const int y = static_cast<int>((idx / target_dims.nx) % target_dims.ny);
    const int z = static_cast<int>(idx / (static_cast<std::int64_t>(target_dims.nx) * target_dims.ny));
    const double sx = std::clamp(source_coord(x, sd.nx, target_dims.nx), 0.0, static_cast<double>(sd.nx - 1));
    const double sy = std::clamp(source_coord(y, sd.ny, target_dims.ny), 0.0, static_cast<double>(sd.ny - 1));
    const double sz = std::clamp(source_coord(z, sd.nz, target_dims.nz), 0.0, static_cast<double>(sd.nz - 1));
    if (interp == Interp::trilinear) {
      const int x0 = static_cast<int>(std::floor(sx)), y0 = static_cast<int>(std::floor(sy)),
                z0 = static_cast<int>(std::floor(sz));
      const int x1 = std::min(x0 + 1, sd.nx - 1), y1 = std::min(y0 + 1, sd.ny - 1),
                z1 = std::min(z0 + 1, sd.nz - 1);
      const double fx = sx - x0, fy = sy - y0, fz = sz - z0;
      const double c00 = v.at(x0, y0, z0) * (1.0 - fx) + v.at(x1, y0, z0) * fx;
      const double c10 = v.at(x0, y1, z0) * (1.0 - fx) + v.at(x1, y1, z0) * fx;
      const double c01 = v.at(x0, y0, z1) * (1.0 - fx) + v.at(x1, y0, z1) * fx;
      const double c11 = v.at(x0, y1, z1) * (1.0 - fx) + v.at(x1, y1, z1) * fx;
      out[static_cast<std::size_t>(idx)] =
          static_cast<float>((c00 * (1.0 - fy) + c10 * fy) * (1.0 - fz) + (c01 * (1.0 - fy) + c11 * fy) * fz);
    } else {
      const int nx = std::clamp(static_cast<int>(std::floor(sx + 0.5)), 0, sd.nx - 1);
      const int ny = std::clamp(static_cast<int>(std::floor(sy + 0.5)), 0, sd.ny - 1);
      const int nz = std::clamp(static_cast<int>(std::floor(sz + 0.5)), 0, sd.nz - 1);
      out[static_cast<std::size_t>(idx)] = v.at(nx, ny, nz);
    }
  }
  return Volume3D(target_dims, target_spacing, std::move(out));
}

double psnr(const Volume3D& a, const Volume3D& b, double dynamic_range) {
  if (!(a.dims() == b.dims())) throw Error(Errc::dims_mismatch, "psnr: volumes have different dims");
  double acc = 0.0;
  for (std::int64_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a.data()[static_cast<std::size_t>(i)]) -
                     static_cast<double>(b.data()[static_cast<std::size_t>(i)]);
    acc += d * d;
  }
  const double mse = acc / static_cast<double>(a.size());
  if (mse == 0.0) throw Error(Errc::zero_mse, "volumes are identical; PSNR is unbounded");
  return 10.0 * std::log10(dynamic_range * dynamic_range / mse);
}

namespace {

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

Field filter_axis(const Field& in, int axis, const std::vector<double>& w) {
  const int win = static_cast<int>(w.size());
  Field out;
  out.dims = in.dims;
  (axis == 0 ? out.dims.nx : axis == 1 ? out.dims.ny : out.dims.nz) -= win - 1;
  out.data.resize(static_cast<std::size_t>(out.dims.count()));
  const std::int64_t stride =
      axis == 0 ? 1 : (axis == 1 ? in.dims.nx : static_cast<std::int64_t>(in.dims.nx) * in.dims.ny);
  for (std::int64_t idx = 0; idx < out.dims.count(); ++idx) {
    const int x = static_cast<int>(idx % out.dims.nx);
    const int y = static_cast<int>((idx / out.dims.nx) % out.dims.ny);
    const int z = static_cast<int>(idx / (static_cast<std::int64_t>(out.dims.nx) * out.dims.ny));
    const std::int64_t src0 = static_cast<std::int64_t>(x) +
                              static_cast<std::int64_t>(in.dims.nx) *
                                  (static_cast<std::int64_t>(y) + static_cast<std::int64_t>(in.dims.ny) * z);
    double acc = 0.0;
    for (int t = 0; t < win; ++t)
      acc += w[static_cast<std::size_t>(t)] * in.data[static_cast<std::size_t>(src0 + t * stride)];
    out.data[static_cast<std::size_t>(idx)] = static_cast<float>(acc);
  }
  return out;
}

Field filter_valid(const Field& in, const std::vector<double>& w) {
  Field f = filter_axis(in, 0, w);
  f = filter_axis(f, 1, w);
  return filter_axis(f, 2, w);
}

Field downsample2(const Field& in) {
  Field out;
  out.dims = {std::max(1, in.dims.nx / 2), std::max(1, in.dims.ny / 2), std::max(1, in.dims.nz / 2)};
  out.data.resize(static_cast<std::size_t>(out.dims.count()));
  for (std::int64_t idx = 0; idx < out.dims.count(); ++idx) {
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
  }
  return out;
}

Field product(const Field& a, const Field& b) {
  Field out{a.dims, std::vector<float>(a.data.size())};
  for (std::size_t i = 0; i < a.data.size(); ++i) out.data[i] = a.data[i] * b.data[i];
  return out;
}

}  // namespace

double ms_ssim(const Volume3D& a, const Volume3D& b, const MsSsimConfig& cfg) {
  if (!(a.dims() == b.dims())) throw Error(Errc::dims_mismatch, "ms_ssim: volumes have different dims");
  {
    Dims d = a.dims();
    for (int s = 0; s < cfg.scales(); ++s) {
      if (s > 0) d = {std::max(1, d.nx / 2), std::max(1, d.ny / 2), std::max(1, d.nz / 2)};
      const int axes[3] = {d.nx, d.ny, d.nz};
      for (int ax = 0; ax < 3; ++ax)
        if (axes[ax] < cfg.window)
          throw Error(Errc::volume_too_small,
                      std::string("ms_ssim: axis ") + "xyz"[ax] + " is " + std::to_string(axes[ax]) +
                          " at scale " + std::to_string(s + 1) + ", window needs " + std::to_string(cfg.window));
    }
  }
  std::vector<double> weights = cfg.weights;
  if (cfg.renormalize_weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    for (double& w : weights) w /= total;
  }
  const auto w = gaussian_window(cfg.window, cfg.window_sigma);
  const double c1 = (cfg.k1 * cfg.dynamic_range) * (cfg.k1 * cfg.dynamic_range);
  const double c2 = (cfg.k2 * cfg.dynamic_range) * (cfg.k2 * cfg.dynamic_range);

  Field x{a.dims(), a.data()};
  Field y{b.dims(), b.data()};
  double result = 1.0;
  for (int s = 0; s < cfg.scales(); ++s) {
    if (s > 0) {
      x = downsample2(x);
      y = downsample2(y);
    }
    const Field mx = filter_valid(x, w);
    const Field my = filter_valid(y, w);
    const Field mxx = filter_valid(product(x, x), w);
    const Field myy = filter_valid(product(y, y), w);
    const Field mxy = filter_valid(product(x, y), w);
    double cs_acc = 0.0, ssim_acc = 0.0;
    for (std::size_t i = 0; i < mx.data.size(); ++i) {
      const double mux = mx.data[i], muy = my.data[i];
      const double vx = std::max(0.0, static_cast<double>(mxx.data[i]) - mux * mux);
      const double vy = std::max(0.0, static_cast<double>(myy.data[i]) - muy * muy);
      const double bound = std::sqrt(vx * vy);
      const double cov = std::clamp(static_cast<double>(mxy.data[i]) - mux * muy, -bound, bound);
      const double cs = (2.0 * cov + c2) / (vx + vy + c2);
      cs_acc += cs;
      ssim_acc += cs * (2.0 * mux * muy + c1) / (mux * mux + muy * muy + c1);
    }
    const double n = static_cast<double>(mx.data.size());
    const bool coarsest = (s == cfg.scales() - 1);
    const double base = std::max(0.0, (coarsest ? ssim_acc : cs_acc) / n);
    result *= std::pow(base, weights[static_cast<std::size_t>(s)]);
  }
  return result;
}

std::vector<double> extract_features(const Volume3D& v) {
  std::vector<double> out;
  struct Grid {
    int gx, gy, gz;
  };
  for (const Grid& g : {Grid{8, 8, 4}, Grid{4, 4, 2}, Grid{2, 2, 1}}) {
    // Block order is x-fastest, matching the parallel kernel.
    for (std::int64_t b = 0; b < static_cast<std::int64_t>(g.gx) * g.gy * g.gz; ++b) {
      const int bx = static_cast<int>(b % g.gx);
      const int by = static_cast<int>((b / g.gx) % g.gy);
      const int bz = static_cast<int>(b / (static_cast<std::int64_t>(g.gx) * g.gy));
      const Dims d = v.dims();
      const int x0 = static_cast<int>(static_cast<std::int64_t>(bx) * d.nx / g.gx);
      const int x1 = static_cast<int>(static_cast<std::int64_t>(bx + 1) * d.nx / g.gx);
      const int y0 = static_cast<int>(static_cast<std::int64_t>(by) * d.ny / g.gy);
      const int y1 = static_cast<int>(static_cast<std::int64_t>(by + 1) * d.ny / g.gy);
      const int z0 = static_cast<int>(static_cast<std::int64_t>(bz) * d.nz / g.gz);
      const int z1 = static_cast<int>(static_cast<std::int64_t>(bz + 1) * d.nz / g.gz);
      double acc = 0.0;
      std::int64_t cnt = 0;
      for (int z = z0; z < z1; ++z)
        for (int y = y0; y < y1; ++y)
          for (int x = x0; x < x1; ++x) {
            acc += v.at(x, y, z);
            ++cnt;
          }
      out.push_back(cnt > 0 ? acc / static_cast<double>(cnt) : 0.0);
    }
  }
  double acc = 0.0;
  for (float f : v.data()) acc += f;
  const double mean = acc / static_cast<double>(v.size());
  double var = 0.0;
  for (float f : v.data()) var += (f - mean) * (f - mean);
  var /= static_cast<double>(v.size());
  float lo = v.data()[0], hi = v.data()[0];
  for (float f : v.data()) {
    lo = std::min(lo, f);
    hi = std::max(hi, f);
  }
  out.push_back(mean);
  out.push_back(std::sqrt(std::max(0.0, var)));
  out.push_back(lo);
  out.push_back(hi);
  return out;
}

ClusterModel kmeans(const Volume3D& v, int k, std::uint64_t seed, int max_iters, double tol) {
  if (k < 1) throw Error(Errc::invalid_argument, "kmeans: k must be >= 1");
  const std::span<const float> values(v.data());
  const std::int64_t n = v.size();
  std::vector<double> centroids = detail::kmeanspp_init(values, k, seed);
  std::vector<std::int32_t> assign(static_cast<std::size_t>(n), 0);
  std::vector<double> trace;
  bool converged = false;
  bool reseeded_once = false;

  const auto assign_pass = [&]() {
    double inertia = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
      const int c = detail::nearest_centroid(values[static_cast<std::size_t>(i)], centroids);
      assign[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(c);
      const double d = static_cast<double>(values[static_cast<std::size_t>(i)]) - centroids[static_cast<std::size_t>(c)];
      inertia += d * d;
    }
    return inertia;
  };

  for (int iter = 0; iter < max_iters; ++iter) {
    const double inertia = assign_pass();
    if (!trace.empty() && inertia > trace.back()) {
      converged = true;
      break;
    }
    trace.push_back(inertia);
    if (trace.size() >= 2 &&
        std::abs(trace[trace.size() - 2] - inertia) / std::max(inertia, 1e-300) < tol) {
      converged = true;
      break;
    }
    std::vector<double> sums(static_cast<std::size_t>(k), 0.0);
    std::vector<std::int64_t> counts(static_cast<std::size_t>(k), 0);
    for (std::int64_t i = 0; i < n; ++i) {
      sums[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])] += values[static_cast<std::size_t>(i)];
      counts[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])] += 1;
    }
    bool any_empty = false;
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0)
        centroids[static_cast<std::size_t>(c)] = sums[static_cast<std::size_t>(c)] / static_cast<double>(counts[static_cast<std::size_t>(c)]);
      else
        any_empty = true;
    }
    if (any_empty) {
      if (reseeded_once) throw Error(Errc::degenerate_clusters, "empty cluster persisted after one reseeding retry");
      reseeded_once = true;
      for (int c = 0; c < k; ++c) {
        if (counts[static_cast<std::size_t>(c)] != 0) continue;
        double best_d = -1.0;
        std::int64_t best_i = 0;
        for (std::int64_t i = 0; i < n; ++i) {
          const double d = std::abs(static_cast<double>(values[static_cast<std::size_t>(i)]) -
                                    centroids[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])]);
          if (d > best_d) {
            best_d = d;
            best_i = i;
          }
        }
        centroids[static_cast<std::size_t>(c)] = values[static_cast<std::size_t>(best_i)];
      }
    }
  }
  std::sort(centroids.begin(), centroids.end());
  for (int c = 0; c + 1 < k; ++c)
    if (!(centroids[static_cast<std::size_t>(c)] < centroids[static_cast<std::size_t>(c + 1)]))
      throw Error(Errc::degenerate_clusters, "coincident centroids after convergence");
  const double final_inertia = assign_pass();
  if (trace.empty() || final_inertia <= trace.back()) trace.push_back(final_inertia);

  return ClusterModel{k,
                      std::move(centroids),
                      LabelMap3D(v.dims(), v.spacing(), std::move(assign)),
                      final_inertia,
                      std::move(trace),
                      converged};
}

}  // namespace synthlab::serial
