#pragma once

#include "synthlab/features.hpp"
#include "synthlab/kmeans.hpp"
#include "synthlab/metrics.hpp"
#include "synthlab/resample.hpp"
#include "synthlab/smooth.hpp"

// Single-threaded reference implementations of the hot kernels, kept for
// equivalence testing and the benchmark target. Maps match the parallel path
// bit-for-bit; scalar reductions use plain left-to-right accumulation, which
// coincides with the blocked order for inputs up to one reduction block.
namespace synthlab::serial {

Volume3D gaussian_smooth(const Volume3D& v, double sigma);
Volume3D resample(const Volume3D& v, Dims target_dims, Spacing target_spacing, Interp interp);
double psnr(const Volume3D& a, const Volume3D& b, double dynamic_range = 1.0);
double ms_ssim(const Volume3D& a, const Volume3D& b, const MsSsimConfig& cfg = {});
std::vector<double> extract_features(const Volume3D& v);
ClusterModel kmeans(const Volume3D& v, int k, std::uint64_t seed,
                    int max_iters = kKmeansDefaultMaxIters, double tol = kKmeansDefaultTol);

}  // namespace synthlab::serial
