#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "synthlab/volume.hpp"

namespace synthlab {

enum class AugmentOpKind { flip, affine, elastic, noise, blur, gamma, bias_field };

const char* augment_op_name(AugmentOpKind k);

// One sampled operation with every parameter recorded; random fields are
// regenerated from the stored sub-seed, so replay is bit-exact.
struct AugmentOp {
  AugmentOpKind kind = AugmentOpKind::flip;
  // flip
  std::array<bool, 3> flip_axes{false, false, false};
  // affine
  std::array<double, 3> rotate_deg{0.0, 0.0, 0.0};
  double scale = 1.0;
  std::array<double, 3> translate_mm{0.0, 0.0, 0.0};
  // elastic
  double elastic_alpha = 0.0;   // displacement scale, voxels
  double elastic_sigma = 2.0;   // smoothing of the coarse field, in grid cells
  int elastic_grid_step = 16;   // coarse grid spacing, voxels
  std::uint64_t field_seed = 0;
  // intensity
  double sigma = 0.0;   // noise std or blur sigma
  double gamma = 1.0;
  int bias_order = 3;
  double bias_amplitude = 0.0;
};

struct AugmentPlan {
  std::uint64_t seed = 0;
  std::vector<AugmentOp> ops;

  std::string to_json() const;
  static AugmentPlan from_json(const std::string& text);
};

// Probabilities and parameter ranges for sampling. The defaults are a config
// surface, not a claim about any particular training recipe.
struct AugmentConfig {
  std::array<double, 3> p_flip{0.5, 0.5, 0.0};
  double p_affine = 0.5;
  double rotate_max_deg = 10.0;
  double scale_min = 0.9, scale_max = 1.1;
  double translate_max_mm = 5.0;
  double p_elastic = 0.3;
  double elastic_alpha_max = 2.0;
  double elastic_sigma = 2.0;
  int elastic_grid_step = 16;
  double p_noise = 0.3;
  double noise_sigma_max = 0.05;
  double p_blur = 0.2;
  double blur_sigma_max = 1.5;
  double p_gamma = 0.3;
  double gamma_min = 0.7, gamma_max = 1.4;
  double p_bias = 0.3;
  int bias_order = 3;
  double bias_amplitude_max = 0.3;

  static AugmentConfig from_json(const std::string& text);  // unknown keys rejected
};

// Draws one plan; identical seeds give identical plans.
AugmentPlan sample_plan(std::uint64_t seed, const AugmentConfig& config);

// Applies the plan: spatial ops hit both branches (trilinear for the volume,
// nearest for the labels), intensity ops hit the volume only. The mask, when
// present, never influences the volume output.
std::pair<Volume3D, std::optional<LabelMap3D>> apply(const AugmentPlan& plan, const Volume3D& v,
                                                     const std::optional<LabelMap3D>& mask = std::nullopt);

}  // namespace synthlab
