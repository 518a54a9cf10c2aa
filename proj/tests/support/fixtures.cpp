#include "support/fixtures.hpp"

#include <cmath>

#include "synthlab/rng.hpp"

namespace fixtures {

using synthlab::Dims;
using synthlab::LabelMap3D;
using synthlab::MaskPair;
using synthlab::ProbMap;
using synthlab::SplitMix64;
using synthlab::Volume3D;

namespace {

// Squared normalized ellipsoid coordinate around the volume centre.
double ellipse_r2(const Dims& d, int x, int y, int z, double rx, double ry, double rz) {
  const double cx = 0.5 * (d.nx - 1), cy = 0.5 * (d.ny - 1), cz = 0.5 * (d.nz - 1);
  const double ux = (x - cx) / (rx * d.nx);
  const double uy = (y - cy) / (ry * d.ny);
  const double uz = (z - cz) / (rz * d.nz);
  return ux * ux + uy * uy + uz * uz;
}

}  // namespace

Volume3D make_phantom(Dims dims, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<float> data(static_cast<std::size_t>(dims.count()), 0.0f);
  for (int z = 0; z < dims.nz; ++z)
    for (int y = 0; y < dims.ny; ++y)
      for (int x = 0; x < dims.nx; ++x) {
        const double outer = ellipse_r2(dims, x, y, z, 0.42, 0.42, 0.42);
        if (outer > 1.0) continue;  // exact zero background
        const double inner = ellipse_r2(dims, x, y, z, 0.2, 0.2, 0.2);
        const double base = inner <= 1.0 ? 0.8 : 0.35;
        const double noise = 0.04 * (rng.next_double() - 0.5);
        const std::size_t idx = static_cast<std::size_t>(
            x + static_cast<std::int64_t>(dims.nx) * (y + static_cast<std::int64_t>(dims.ny) * z));
        data[idx] = static_cast<float>(base + noise);
      }
  return Volume3D(dims, {1.0, 1.0, 1.0}, std::move(data));
}

MaskPair make_phantom_masks(Dims dims) {
  const auto n = static_cast<std::size_t>(dims.count());
  std::vector<std::uint8_t> endo(n, 0), wall(n, 0);
  for (int z = 0; z < dims.nz; ++z)
    for (int y = 0; y < dims.ny; ++y)
      for (int x = 0; x < dims.nx; ++x) {
        const double r2 = ellipse_r2(dims, x, y, z, 0.2, 0.2, 0.2);
        const std::size_t idx = static_cast<std::size_t>(
            x + static_cast<std::int64_t>(dims.nx) * (y + static_cast<std::int64_t>(dims.ny) * z));
        if (r2 <= 0.55) {
          endo[idx] = 1;
        } else if (r2 <= 1.0) {
          wall[idx] = 1;
        }
      }
  return MaskPair(dims, std::move(endo), std::move(wall));
}

Volume3D make_two_block_volume(Dims dims, std::uint64_t seed, double lo, double hi, double noise) {
  SplitMix64 rng(seed);
  std::vector<float> data(static_cast<std::size_t>(dims.count()));
  for (int z = 0; z < dims.nz; ++z)
    for (int y = 0; y < dims.ny; ++y)
      for (int x = 0; x < dims.nx; ++x) {
        const double base = x < dims.nx / 2 ? lo : hi;
        const std::size_t idx = static_cast<std::size_t>(
            x + static_cast<std::int64_t>(dims.nx) * (y + static_cast<std::int64_t>(dims.ny) * z));
        data[idx] = static_cast<float>(base + noise * (2.0 * rng.next_double() - 1.0));
      }
  return Volume3D(dims, {1.0, 1.0, 1.0}, std::move(data));
}

Volume3D random_volume(Dims dims, std::uint64_t seed, double lo, double hi) {
  SplitMix64 rng(seed);
  std::vector<float> data(static_cast<std::size_t>(dims.count()));
  for (auto& v : data) v = static_cast<float>(lo + (hi - lo) * rng.next_double());
  return Volume3D(dims, {1.0, 1.0, 1.0}, std::move(data));
}

LabelMap3D random_labels(Dims dims, int classes, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<std::int32_t> labels(static_cast<std::size_t>(dims.count()));
  for (auto& l : labels) l = static_cast<std::int32_t>(rng.next_below(static_cast<std::uint64_t>(classes)));
  return LabelMap3D(dims, {1.0, 1.0, 1.0}, std::move(labels));
}

ProbMap random_probmap(Dims dims, int classes, std::uint64_t seed, double min_p) {
  SplitMix64 rng(seed);
  const auto n = static_cast<std::size_t>(dims.count());
  std::vector<float> data(n * static_cast<std::size_t>(classes));
  for (std::size_t v = 0; v < n; ++v) {
    std::vector<double> raw(static_cast<std::size_t>(classes));
    double total = 0.0;
    for (int c = 0; c < classes; ++c) {
      raw[static_cast<std::size_t>(c)] = min_p * classes + rng.next_double();
      total += raw[static_cast<std::size_t>(c)];
    }
    for (int c = 0; c < classes; ++c)
      data[static_cast<std::size_t>(c) * n + v] = static_cast<float>(raw[static_cast<std::size_t>(c)] / total);
  }
  return ProbMap(dims, classes, std::move(data));
}

ProbMap onehot_probmap(const LabelMap3D& labels, int classes) {
  const auto n = static_cast<std::size_t>(labels.size());
  std::vector<float> data(n * static_cast<std::size_t>(classes), 0.0f);
  for (std::size_t v = 0; v < n; ++v)
    data[static_cast<std::size_t>(labels.labels()[v]) * n + v] = 1.0f;
  return ProbMap(labels.dims(), classes, std::move(data));
}

}  // namespace fixtures
