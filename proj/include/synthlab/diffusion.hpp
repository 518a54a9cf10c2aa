#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "synthlab/errors.hpp"

namespace synthlab {

// Diffusion variance schedule indexed by step t in [1, T]; index 0 carries
// the boundary convention alpha_bar[0] = 1. After beta clipping, alpha_bar
// is recomputed as the running product, so alpha_bar[t] =
// alpha_bar[t-1] * alpha[t] holds exactly.
struct NoiseSchedule {
  int steps = 0;                  // T
  std::vector<double> beta;       // size T+1, [0] unused
  std::vector<double> alpha;      // 1 - beta
  std::vector<double> alpha_bar;  // running product, strictly decreasing
};

inline constexpr double kCosineDefaultOffset = 0.008;
inline constexpr double kBetaMin = 1e-8;
inline constexpr double kBetaMax = 0.999;

// Squared-cosine decay: alpha_bar(t) = f(t)/f(0) with
// f(t) = cos^2(((t/T + s)/(1 + s)) * pi/2); beta clipped to [1e-8, 0.999].
NoiseSchedule cosine_schedule(int steps, double offset = kCosineDefaultOffset);

struct LatentTensor {
  std::vector<std::uint32_t> shape;
  std::vector<float> data;

  std::int64_t size() const {
    std::int64_t n = 1;
    for (auto d : shape) n *= d;
    return n;
  }

  static LatentTensor create(std::vector<std::uint32_t> shape, std::vector<float> data);
};

// z_t = sqrt(alpha_bar_t) * z + sqrt(1 - alpha_bar_t) * eps. t = 0 is the
// identity boundary.
LatentTensor forward_noise(const LatentTensor& z, int t, const NoiseSchedule& sched,
                           const LatentTensor& eps);

// Mean squared error over all elements.
double denoise_loss(const LatentTensor& eps_true, const LatentTensor& eps_pred);

// Classifier-free guidance blend: uncond + w * (cond - uncond).
LatentTensor cfg_blend(const LatentTensor& eps_uncond, const LatentTensor& eps_cond, double weight);

// LTNS container: magic "LTNS", u8 rank, rank u32 dims, float32 payload.
// Rank-3 volume tensors store x fastest; rank-4 class tensors (C,H,W,D)
// store C planes of x-fastest volumes, C slowest. See ProbMap.
LatentTensor load_tensor(const std::filesystem::path& path);
void save_tensor(const LatentTensor& t, const std::filesystem::path& path);

}  // namespace synthlab
