#pragma once

#include <span>
#include <vector>

#include "synthlab/diffusion.hpp"
#include "synthlab/volume.hpp"

namespace synthlab {

// Per-voxel class probabilities, stored as C planes of x-fastest volumes
// (plane c at offset c * voxel_count). Probabilities must be non-negative
// and sum to 1 within 1e-6 per voxel.
class ProbMap {
 public:
  ProbMap(Dims dims, int classes, std::vector<float> data);

  const Dims& dims() const { return dims_; }
  int classes() const { return classes_; }
  const std::vector<float>& data() const { return data_; }
  std::int64_t voxels() const { return dims_.count(); }

  float prob(int c, std::int64_t voxel) const {
    return data_[static_cast<std::size_t>(c) * static_cast<std::size_t>(dims_.count()) +
                 static_cast<std::size_t>(voxel)];
  }

  // Rank-4 LTNS round trip, dims (C, H, W, D).
  static ProbMap from_tensor(const LatentTensor& t);
  LatentTensor to_tensor() const;

  // Skips the probability validation; for derivative probes only.
  static ProbMap unchecked(Dims dims, int classes, std::vector<float> data);

 private:
  ProbMap() = default;
  Dims dims_;
  int classes_ = 0;
  std::vector<float> data_;
};

// Inverse-frequency class weights normalized to sum to C. Construction via
// class_weights enforces the invariants; the loss functions also accept raw
// positive weight spans.
struct ClassWeights {
  std::vector<double> w;
};

ClassWeights class_weights(const LabelMap3D& target, int classes);

inline constexpr double kDiceSmooth = 1e-5;
inline constexpr double kCeClamp = 1e-12;

struct DiceResult {
  std::vector<double> per_class;
  double mean = 0.0;  // over foreground classes (c >= 1)
};

// Soft Dice per class: (2 sum(p*t) + eps) / (sum p + sum t + eps).
DiceResult soft_dice(const ProbMap& pred, const LabelMap3D& target, double smooth = kDiceSmooth);

// Mean over voxels of -w[t] * log(max(p_t, clamp)).
double cross_entropy(const ProbMap& pred, const LabelMap3D& target, std::span<const double> weights,
                     double clamp = kCeClamp);

// (1 - mean soft Dice) + weighted cross entropy.
double shape_consistency_loss(const ProbMap& pred, const LabelMap3D& target,
                              std::span<const double> weights);

// Mean absolute difference between two volumes.
double l1_loss(const Volume3D& a, const Volume3D& b);

enum class LossKind {
  soft_dice,
  cross_entropy,
  shape_consistency,
  l1_onehot,  // mean |p - onehot(target)|; linear in p, central differences are exact
};

// Compares the analytic gradient of the chosen loss against central finite
// differences at step h and returns the worst relative error. The prediction
// must be interior to the simplex: min prob > 10 h.
double grad_check(LossKind kind, const ProbMap& pred, const LabelMap3D& target,
                  std::span<const double> weights, double h);

}  // namespace synthlab
