#include "synthlab/resample.hpp"

#include <algorithm>
#include <cmath>

#include "synthlab/parallel.hpp"

namespace synthlab {

namespace detail {

void check_target(Dims target_dims, Spacing target_spacing) {
  if (target_dims.nx <= 0 || target_dims.ny <= 0 || target_dims.nz <= 0)
    throw Error(Errc::invalid_argument, "resample: target dims must be positive");
  if (!(target_spacing[0] > 0.0) || !(target_spacing[1] > 0.0) || !(target_spacing[2] > 0.0))
    throw Error(Errc::invalid_argument, "resample: target spacing must be positive");
}

// Voxel-center aligned source coordinate for target index i.
inline double source_coord(int i, int n_src, int n_tgt) {
  return (static_cast<double>(i) + 0.5) * static_cast<double>(n_src) / static_cast<double>(n_tgt) - 0.5;
}

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

template <class Fetch>
double trilinear_sample(double sx, double sy, double sz, Dims d, Fetch&& fetch) {
  sx = std::clamp(sx, 0.0, static_cast<double>(d.nx - 1));
  sy = std::clamp(sy, 0.0, static_cast<double>(d.ny - 1));
  sz = std::clamp(sz, 0.0, static_cast<double>(d.nz - 1));
  const int x0 = clampi(static_cast<int>(std::floor(sx)), 0, d.nx - 1);
  const int y0 = clampi(static_cast<int>(std::floor(sy)), 0, d.ny - 1);
  const int z0 = clampi(static_cast<int>(std::floor(sz)), 0, d.nz - 1);
  const int x1 = std::min(x0 + 1, d.nx - 1);
  const int y1 = std::min(y0 + 1, d.ny - 1);
  const int z1 = std::min(z0 + 1, d.nz - 1);
  const double fx = sx - x0, fy = sy - y0, fz = sz - z0;
  const double c00 = fetch(x0, y0, z0) * (1.0 - fx) + fetch(x1, y0, z0) * fx;
  const double c10 = fetch(x0, y1, z0) * (1.0 - fx) + fetch(x1, y1, z0) * fx;
  const double c01 = fetch(x0, y0, z1) * (1.0 - fx) + fetch(x1, y0, z1) * fx;
  const double c11 = fetch(x0, y1, z1) * (1.0 - fx) + fetch(x1, y1, z1) * fx;
  const double c0 = c00 * (1.0 - fy) + c10 * fy;
  const double c1 = c01 * (1.0 - fy) + c11 * fy;
  return c0 * (1.0 - fz) + c1 * fz;
}

inline int nearest_index(double s, int n) {
  return clampi(static_cast<int>(std::floor(s + 0.5)), 0, n - 1);
}

}  // namespace detail

Volume3D resample(const Volume3D& v, Dims target_dims, Spacing target_spacing, Interp interp) {
  detail::check_target(target_dims, target_spacing);
  if (target_dims == v.dims()) return Volume3D(v.dims(), target_spacing, v.data());

  const Dims sd = v.dims();
  std::vector<float> out(static_cast<std::size_t>(target_dims.count()));
  const auto fetch = [&](int x, int y, int z) { return static_cast<double>(v.at(x, y, z)); };
  par::parallel_for(target_dims.count(), [&](std::int64_t idx) {
    const int x = static_cast<int>(idx % target_dims.nx);
    const int y = static_cast<int>((idx / target_dims.nx) % target_dims.ny);
    const int z = static_cast<int>(idx / (static_cast<std::int64_t>(target_dims.nx) * target_dims.ny));
    const double sx = detail::source_coord(x, sd.nx, target_dims.nx);
    const double sy = detail::source_coord(y, sd.ny, target_dims.ny);
    const double sz = detail::source_coord(z, sd.nz, target_dims.nz);
    if (interp == Interp::trilinear) {
      out[static_cast<std::size_t>(idx)] = static_cast<float>(detail::trilinear_sample(sx, sy, sz, sd, fetch));
    } else {
      out[static_cast<std::size_t>(idx)] =
          v.at(detail::nearest_index(sx, sd.nx), detail::nearest_index(sy, sd.ny), detail::nearest_index(sz, sd.nz));
    }
  });
  return Volume3D(target_dims, target_spacing, std::move(out));
}

LabelMap3D resample_labels(const LabelMap3D& m, Dims target_dims, Spacing target_spacing) {
  detail::check_target(target_dims, target_spacing);
  if (target_dims == m.dims()) return LabelMap3D(m.dims(), target_spacing, m.labels());

  const Dims sd = m.dims();
  std::vector<std::int32_t> out(static_cast<std::size_t>(target_dims.count()));
  par::parallel_for(target_dims.count(), [&](std::int64_t idx) {
    const int x = static_cast<int>(idx % target_dims.nx);
    const int y = static_cast<int>((idx / target_dims.nx) % target_dims.ny);
    const int z = static_cast<int>(idx / (static_cast<std::int64_t>(target_dims.nx) * target_dims.ny));
    out[static_cast<std::size_t>(idx)] =
        m.at(detail::nearest_index(detail::source_coord(x, sd.nx, target_dims.nx), sd.nx),
             detail::nearest_index(detail::source_coord(y, sd.ny, target_dims.ny), sd.ny),
             detail::nearest_index(detail::source_coord(z, sd.nz, target_dims.nz), sd.nz));
  });
  return LabelMap3D(target_dims, target_spacing, std::move(out));
}

}  // namespace synthlab
