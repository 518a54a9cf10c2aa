#pragma once

#include "synthlab/features.hpp"

namespace synthlab {

struct FidOptions {
  // Adds eps*I to both covariances before the matrix root; off by default
  // and recorded by callers that report results.
  bool regularize = false;
  double regularize_eps = 1e-6;
};

// Frechet distance between Gaussians fitted to two feature distributions:
// |mu_r - mu_g|^2 + Tr(S_r) + Tr(S_g) - 2 Tr((S_r S_g)^(1/2)). The matrix
// root is taken through the symmetric form S_r^(1/2) S_g S_r^(1/2) with
// small negative eigenvalues clamped to zero; the result is clamped at zero
// unless the raw value is negative beyond tolerance, which is an error.
double fid(const FeatureMoments& real, const FeatureMoments& gen, const FidOptions& opts = {});

}  // namespace synthlab
