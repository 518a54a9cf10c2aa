#pragma once

#include "synthlab/volume.hpp"

namespace synthlab {

enum class Interp { trilinear, nearest };

// Maps the source field of view onto the target grid with voxel-center
// alignment: source coordinate = (i + 0.5) * n_src / n_tgt - 0.5, clamped.
// The target spacing is recorded in the output header; it does not enter the
// geometry. Identical target dims return the input data bit-exactly.
Volume3D resample(const Volume3D& v, Dims target_dims, Spacing target_spacing, Interp interp);

// Nearest-neighbour only, so the output label set is a subset of the input's.
LabelMap3D resample_labels(const LabelMap3D& m, Dims target_dims, Spacing target_spacing);

}  // namespace synthlab
