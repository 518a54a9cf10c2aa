#pragma once

#include <cstdint>
#include <vector>

#include "synthlab/losses.hpp"
#include "synthlab/volume.hpp"

namespace fixtures {

// Cardiac-like phantom: zero background shell, an outer tissue ellipsoid
// around 0.35 and an inner bright ellipsoid around 0.8, with mild noise.
// Guarantees exact-zero voxels.
synthlab::Volume3D make_phantom(synthlab::Dims dims, std::uint64_t seed);

// Disjoint endo/wall masks placed inside the phantom's bright region: endo is
// an ellipsoid, wall a shell around it.
synthlab::MaskPair make_phantom_masks(synthlab::Dims dims);

// Spatially coherent bimodal volume: left half around `lo`, right half
// around `hi`, additive uniform noise of half-width `noise`.
synthlab::Volume3D make_two_block_volume(synthlab::Dims dims, std::uint64_t seed, double lo = 0.2,
                                         double hi = 0.8, double noise = 0.02);

// Uniform random volume in [lo, hi).
synthlab::Volume3D random_volume(synthlab::Dims dims, std::uint64_t seed, double lo = 0.0, double hi = 1.0);

// Random labels in [0, classes).
synthlab::LabelMap3D random_labels(synthlab::Dims dims, int classes, std::uint64_t seed);

// Random interior probability map: every probability at least min_p.
synthlab::ProbMap random_probmap(synthlab::Dims dims, int classes, std::uint64_t seed, double min_p = 0.05);

// One-hot probability map for a label map.
synthlab::ProbMap onehot_probmap(const synthlab::LabelMap3D& labels, int classes);

}  // namespace fixtures
