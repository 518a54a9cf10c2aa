#include "synthlab/volume.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "synthlab/parallel.hpp"

namespace synthlab {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::io_failure: return "IoFailure";
    case Errc::malformed_header: return "MalformedHeader";
    case Errc::unsupported_dtype: return "UnsupportedDtype";
    case Errc::truncated_payload: return "TruncatedPayload";
    case Errc::constant_volume: return "ConstantVolume";
    case Errc::dims_mismatch: return "DimsMismatch";
    case Errc::overlapping_masks: return "OverlappingMasks";
    case Errc::degenerate_clusters: return "DegenerateClusters";
    case Errc::too_few_distinct_values: return "TooFewDistinctValues";
    case Errc::single_cluster: return "SingleCluster";
    case Errc::coincident_centroids: return "CoincidentCentroids";
    case Errc::zero_mse: return "ZeroMse";
    case Errc::volume_too_small: return "VolumeTooSmall";
    case Errc::too_few_samples: return "TooFewSamples";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::nonfinite_eigenvalue: return "NonFiniteEigenvalue";
    case Errc::malformed_feature_file: return "MalformedFeatureFile";
    case Errc::malformed_tensor_file: return "MalformedTensorFile";
    case Errc::shape_mismatch: return "ShapeMismatch";
    case Errc::step_out_of_range: return "StepOutOfRange";
    case Errc::label_out_of_range: return "LabelOutOfRange";
    case Errc::absent_class: return "AbsentClass";
    case Errc::boundary_point: return "BoundaryPoint";
    case Errc::invalid_range: return "InvalidRange";
    case Errc::unnormalized_input: return "UnnormalizedInput";
    case Errc::all_zero_differences: return "AllZeroDifferences";
    case Errc::invalid_argument: return "InvalidArgument";
  }
  return "UnknownError";
}

namespace {

void check_grid(const Dims& dims, const Spacing& spacing, std::size_t n, const char* what) {
  if (dims.nx <= 0 || dims.ny <= 0 || dims.nz <= 0)
    throw Error(Errc::invalid_argument, std::string(what) + ": dims must be positive");
  if (!(spacing[0] > 0.0) || !(spacing[1] > 0.0) || !(spacing[2] > 0.0))
    throw Error(Errc::invalid_argument, std::string(what) + ": spacing must be positive");
  if (static_cast<std::int64_t>(n) != dims.count())
    throw Error(Errc::invalid_argument,
                std::string(what) + ": data length " + std::to_string(n) + " != " +
                    std::to_string(dims.count()) + " voxels");
}

}  // namespace

Volume3D::Volume3D(Dims dims, Spacing spacing, std::vector<float> data)
    : dims_(dims), spacing_(spacing), data_(std::move(data)) {
  check_grid(dims_, spacing_, data_.size(), "Volume3D");
}

Volume3D Volume3D::zeros(Dims dims, Spacing spacing) {
  return Volume3D(dims, spacing, std::vector<float>(static_cast<std::size_t>(dims.count()), 0.0f));
}

LabelMap3D::LabelMap3D(Dims dims, Spacing spacing, std::vector<std::int32_t> labels)
    : dims_(dims), spacing_(spacing), labels_(std::move(labels)) {
  check_grid(dims_, spacing_, labels_.size(), "LabelMap3D");
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] < 0)
      throw Error(Errc::invalid_argument,
                  "LabelMap3D: negative label " + std::to_string(labels_[i]) + " at voxel " + std::to_string(i));
  }
}

LabelMap3D LabelMap3D::zeros(Dims dims, Spacing spacing) {
  return LabelMap3D(dims, spacing, std::vector<std::int32_t>(static_cast<std::size_t>(dims.count()), 0));
}

std::vector<std::int32_t> LabelMap3D::label_set() const {
  std::set<std::int32_t> s(labels_.begin(), labels_.end());
  return {s.begin(), s.end()};
}

MaskPair::MaskPair(Dims dims, std::vector<std::uint8_t> endo, std::vector<std::uint8_t> wall)
    : dims_(dims), endo_(std::move(endo)), wall_(std::move(wall)) {
  const auto n = static_cast<std::size_t>(dims_.count());
  if (endo_.size() != n || wall_.size() != n)
    throw Error(Errc::invalid_argument, "MaskPair: mask length does not match dims");
  for (std::size_t i = 0; i < n; ++i) {
    if (endo_[i] > 1 || wall_[i] > 1)
      throw Error(Errc::invalid_argument, "MaskPair: non-binary value at voxel " + std::to_string(i));
    if (endo_[i] == 1 && wall_[i] == 1)
      throw Error(Errc::overlapping_masks, "endo and wall overlap at voxel " + std::to_string(i));
  }
}

MaskPair MaskPair::from_labelmaps(const LabelMap3D& endo, const LabelMap3D& wall) {
  if (!(endo.dims() == wall.dims()))
    throw Error(Errc::dims_mismatch, "endo and wall masks have different dims");
  const auto n = static_cast<std::size_t>(endo.size());
  std::vector<std::uint8_t> e(n), w(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::int32_t ev = endo.labels()[i];
    const std::int32_t wv = wall.labels()[i];
    if (ev > 1) throw Error(Errc::invalid_argument, "endo mask value " + std::to_string(ev) + " at voxel " + std::to_string(i) + " is not binary");
    if (wv > 1) throw Error(Errc::invalid_argument, "wall mask value " + std::to_string(wv) + " at voxel " + std::to_string(i) + " is not binary");
    e[i] = static_cast<std::uint8_t>(ev);
    w[i] = static_cast<std::uint8_t>(wv);
  }
  return MaskPair(endo.dims(), std::move(e), std::move(w));
}

Volume3D normalize_intensity(const Volume3D& v) {
  const auto& d = v.data();
  float lo = d[0], hi = d[0];
  for (float x : d) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  if (!(hi > lo))
    throw Error(Errc::constant_volume, "cannot normalize a volume with a single distinct value");
  const double scale = 1.0 / (static_cast<double>(hi) - static_cast<double>(lo));
  std::vector<float> out(d.size());
  par::parallel_for(v.size(), [&](std::int64_t i) {
    out[static_cast<std::size_t>(i)] =
        static_cast<float>((static_cast<double>(d[static_cast<std::size_t>(i)]) - lo) * scale);
  });
  return Volume3D(v.dims(), v.spacing(), std::move(out));
}

}  // namespace synthlab
