#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "synthlab/volume.hpp"

namespace synthlab {

// One row per volume; values must be finite.
struct FeatureSet {
  std::int64_t n = 0;
  std::int64_t d = 0;
  std::vector<double> rows;  // n*d, row-major

  std::span<const double> row(std::int64_t i) const {
    return {rows.data() + i * d, static_cast<std::size_t>(d)};
  }

  static FeatureSet from_rows(std::int64_t n, std::int64_t d, std::vector<double> rows);
};

struct FeatureMoments {
  std::vector<double> mu;     // d
  std::vector<double> sigma;  // d*d, symmetric
  std::int64_t d = 0;
  std::int64_t n = 0;  // source sample count
};

// Built-in deterministic descriptor for volumes normalized to [0, 1]:
// block means over 8x8x4, 4x4x2 and 2x2x1 grids plus global
// (mean, std, min, max); d = 296.
inline constexpr std::int64_t kPyramidFeatureDim = 296;
inline constexpr const char* kBuiltinFeatureSource = "builtin-pyramid-296";
std::vector<double> extract_features(const Volume3D& v);

// Sample mean and covariance (1/(n-1)); requires n >= 2.
FeatureMoments moments(const FeatureSet& fs);

// FEAT container: magic "FEAT", u16 version=1, u32 n, u32 d, then n*d
// little-endian float32 row-major. CSV (n rows x d comma-separated columns,
// no header) is accepted on load as well, chosen by sniffing the magic.
FeatureSet load_features(const std::filesystem::path& path);
void save_features(const FeatureSet& fs, const std::filesystem::path& path);

}  // namespace synthlab
