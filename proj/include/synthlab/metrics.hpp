#pragma once

#include <vector>

#include "synthlab/volume.hpp"

namespace synthlab {

// 10*log10(L^2 / MSE) over all voxels. Identical volumes have no finite
// PSNR; that case is a distinct error, never an inf value.
double psnr(const Volume3D& a, const Volume3D& b, double dynamic_range = 1.0);

struct MsSsimConfig {
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 1.0;                         // L
  std::vector<double> weights{0.0448, 0.2856, 0.3001};  // per-scale exponents, coarsest last
  int window = 11;                                     // cubic window edge
  double window_sigma = 1.5;
  // The printed 3-scale weights sum to ~0.63; enable to divide by their sum.
  bool renormalize_weights = false;

  int scales() const { return static_cast<int>(weights.size()); }
};

// Per-window first and second moments; variances are clamped at zero when
// floating-point cancellation drives them slightly negative.
struct WindowStats {
  double mu_x = 0.0, mu_y = 0.0;
  double var_x = 0.0, var_y = 0.0;
  double cov_xy = 0.0;
};

// Multi-scale structural similarity: contrast-structure terms at every scale,
// luminance folded in at the coarsest, each averaged over windows before
// exponentiation. Scales are linked by 2x2x2 average pooling. Throws
// VolumeTooSmall naming the failing axis and scale when a scale's dims drop
// below the window.
double ms_ssim(const Volume3D& a, const Volume3D& b, const MsSsimConfig& cfg = {});

}  // namespace synthlab
