#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "synthlab/errors.hpp"

namespace synthlab {

// Axis order used everywhere in this library: x varies fastest in memory,
// linear index = x + nx*(y + ny*z). File formats store the same order.
struct Dims {
  int nx = 0, ny = 0, nz = 0;

  bool operator==(const Dims&) const = default;
  std::int64_t count() const { return static_cast<std::int64_t>(nx) * ny * nz; }
};

using Spacing = std::array<double, 3>;  // mm per voxel along x, y, z

// Scalar intensity grid. Treated as immutable after construction: operations
// take it by const reference and return new volumes.
class Volume3D {
 public:
  Volume3D(Dims dims, Spacing spacing, std::vector<float> data);

  const Dims& dims() const { return dims_; }
  const Spacing& spacing() const { return spacing_; }
  const std::vector<float>& data() const { return data_; }
  std::vector<float>& mutable_data() { return data_; }

  std::int64_t size() const { return dims_.count(); }
  std::int64_t index(int x, int y, int z) const {
    return static_cast<std::int64_t>(x) +
           static_cast<std::int64_t>(dims_.nx) * (static_cast<std::int64_t>(y) + static_cast<std::int64_t>(dims_.ny) * z);
  }
  float at(int x, int y, int z) const { return data_[static_cast<std::size_t>(index(x, y, z))]; }
  float& at(int x, int y, int z) { return data_[static_cast<std::size_t>(index(x, y, z))]; }

  static Volume3D zeros(Dims dims, Spacing spacing = {1.0, 1.0, 1.0});

 private:
  Dims dims_;
  Spacing spacing_;
  std::vector<float> data_;
};

// Integer semantic labels on the same grid convention as Volume3D.
class LabelMap3D {
 public:
  LabelMap3D(Dims dims, Spacing spacing, std::vector<std::int32_t> labels);

  const Dims& dims() const { return dims_; }
  const Spacing& spacing() const { return spacing_; }
  const std::vector<std::int32_t>& labels() const { return labels_; }
  std::vector<std::int32_t>& mutable_labels() { return labels_; }

  std::int64_t size() const { return dims_.count(); }
  std::int64_t index(int x, int y, int z) const {
    return static_cast<std::int64_t>(x) +
           static_cast<std::int64_t>(dims_.nx) * (static_cast<std::int64_t>(y) + static_cast<std::int64_t>(dims_.ny) * z);
  }
  std::int32_t at(int x, int y, int z) const { return labels_[static_cast<std::size_t>(index(x, y, z))]; }

  // Sorted distinct label values.
  std::vector<std::int32_t> label_set() const;

  static LabelMap3D zeros(Dims dims, Spacing spacing = {1.0, 1.0, 1.0});

 private:
  Dims dims_;
  Spacing spacing_;
  std::vector<std::int32_t> labels_;
};

// Pair of binary expert masks on a shared grid. Disjointness is a load-time
// invariant: a voxel may be endocardium or wall, never both.
class MaskPair {
 public:
  MaskPair(Dims dims, std::vector<std::uint8_t> endo, std::vector<std::uint8_t> wall);

  // Converts label maps whose values must be exactly {0,1}.
  static MaskPair from_labelmaps(const LabelMap3D& endo, const LabelMap3D& wall);

  const Dims& dims() const { return dims_; }
  const std::vector<std::uint8_t>& endo() const { return endo_; }
  const std::vector<std::uint8_t>& wall() const { return wall_; }

 private:
  Dims dims_;
  std::vector<std::uint8_t> endo_;
  std::vector<std::uint8_t> wall_;
};

// min -> 0, max -> 1 affine rescale. Throws Errc::constant_volume when the
// input has fewer than two distinct values.
Volume3D normalize_intensity(const Volume3D& v);

}  // namespace synthlab
