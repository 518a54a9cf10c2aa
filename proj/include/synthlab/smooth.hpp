#pragma once

#include "synthlab/volume.hpp"

namespace synthlab {

// Separable Gaussian, kernel truncated at radius ceil(3*sigma) and
// renormalized; borders handled by symmetric reflection (edge repeated).
// sigma = 0 returns the input unchanged.
Volume3D gaussian_smooth(const Volume3D& v, double sigma);

}  // namespace synthlab
