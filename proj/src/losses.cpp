#include "synthlab/losses.hpp"

#include <algorithm>
#include <cmath>

#include "synthlab/parallel.hpp"

namespace synthlab {

ProbMap::ProbMap(Dims dims, int classes, std::vector<float> data) {
  if (classes < 2) throw Error(Errc::invalid_argument, "ProbMap: needs at least 2 classes");
  if (dims.nx <= 0 || dims.ny <= 0 || dims.nz <= 0)
    throw Error(Errc::invalid_argument, "ProbMap: dims must be positive");
  const std::int64_t n = dims.count();
  if (static_cast<std::int64_t>(data.size()) != n * classes)
    throw Error(Errc::invalid_argument, "ProbMap: data length does not match dims and classes");
  for (std::int64_t v = 0; v < n; ++v) {
    double sum = 0.0;
    for (int c = 0; c < classes; ++c) {
      const float p = data[static_cast<std::size_t>(c) * static_cast<std::size_t>(n) + static_cast<std::size_t>(v)];
      if (!(p >= 0.0f))
        throw Error(Errc::invalid_argument,
                    "ProbMap: negative probability at voxel " + std::to_string(v) + ", class " + std::to_string(c));
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-6)
      throw Error(Errc::invalid_argument,
                  "ProbMap: probabilities at voxel " + std::to_string(v) + " sum to " + std::to_string(sum));
  }
  dims_ = dims;
  classes_ = classes;
  data_ = std::move(data);
}

ProbMap ProbMap::unchecked(Dims dims, int classes, std::vector<float> data) {
  ProbMap p;
  p.dims_ = dims;
  p.classes_ = classes;
  p.data_ = std::move(data);
  return p;
}

ProbMap ProbMap::from_tensor(const LatentTensor& t) {
  if (t.shape.size() != 4)
    throw Error(Errc::malformed_tensor_file, "ProbMap tensor must have rank 4 (C,H,W,D)");
  const int classes = static_cast<int>(t.shape[0]);
  const Dims dims{static_cast<int>(t.shape[1]), static_cast<int>(t.shape[2]), static_cast<int>(t.shape[3])};
  return ProbMap(dims, classes, t.data);
}

LatentTensor ProbMap::to_tensor() const {
  return LatentTensor::create({static_cast<std::uint32_t>(classes_), static_cast<std::uint32_t>(dims_.nx),
                               static_cast<std::uint32_t>(dims_.ny), static_cast<std::uint32_t>(dims_.nz)},
                              data_);
}

namespace {

void check_pair(const ProbMap& pred, const LabelMap3D& target) {
  if (!(pred.dims() == target.dims()))
    throw Error(Errc::dims_mismatch, "prediction and target have different dims");
  for (std::int64_t v = 0; v < target.size(); ++v) {
    const std::int32_t lab = target.labels()[static_cast<std::size_t>(v)];
    if (lab >= pred.classes())
      throw Error(Errc::label_out_of_range, "target label " + std::to_string(lab) + " at voxel " +
                                                std::to_string(v) + " >= C=" + std::to_string(pred.classes()));
  }
}

void check_weights(std::span<const double> weights, int classes) {
  if (static_cast<int>(weights.size()) != classes)
    throw Error(Errc::invalid_argument, "weight count does not match class count");
  for (double w : weights)
    if (!(w > 0.0)) throw Error(Errc::invalid_argument, "class weights must be positive");
}

}  // namespace

ClassWeights class_weights(const LabelMap3D& target, int classes) {
  if (classes < 2) throw Error(Errc::invalid_argument, "class_weights: needs at least 2 classes");
  std::vector<std::int64_t> counts(static_cast<std::size_t>(classes), 0);
  for (std::int32_t lab : target.labels()) {
    if (lab >= classes)
      throw Error(Errc::label_out_of_range, "label " + std::to_string(lab) + " >= C=" + std::to_string(classes));
    counts[static_cast<std::size_t>(lab)] += 1;
  }
  ClassWeights cw;
  cw.w.resize(static_cast<std::size_t>(classes));
  double total = 0.0;
  for (int c = 0; c < classes; ++c) {
    if (counts[static_cast<std::size_t>(c)] == 0)
      throw Error(Errc::absent_class, "class " + std::to_string(c) + " has no voxels");
    cw.w[static_cast<std::size_t>(c)] = 1.0 / static_cast<double>(counts[static_cast<std::size_t>(c)]);
    total += cw.w[static_cast<std::size_t>(c)];
  }
  for (double& w : cw.w) w *= static_cast<double>(classes) / total;
  return cw;
}

DiceResult soft_dice(const ProbMap& pred, const LabelMap3D& target, double smooth) {
  check_pair(pred, target);
  const std::int64_t n = pred.voxels();
  const int classes = pred.classes();
  DiceResult result;
  result.per_class.resize(static_cast<std::size_t>(classes));
  for (int c = 0; c < classes; ++c) {
    const double inter = par::blocked_sum(n, [&](std::int64_t v) {
      const double t = target.labels()[static_cast<std::size_t>(v)] == c ? 1.0 : 0.0;
      return static_cast<double>(pred.prob(c, v)) * t;
    });
    const double psum = par::blocked_sum(n, [&](std::int64_t v) {
      return static_cast<double>(pred.prob(c, v));
    });
    const double tsum = par::blocked_sum(n, [&](std::int64_t v) {
      return target.labels()[static_cast<std::size_t>(v)] == c ? 1.0 : 0.0;
    });
    result.per_class[static_cast<std::size_t>(c)] = (2.0 * inter + smooth) / (psum + tsum + smooth);
  }
  double acc = 0.0;
  for (int c = 1; c < classes; ++c) acc += result.per_class[static_cast<std::size_t>(c)];
  result.mean = acc / static_cast<double>(classes - 1);
  return result;
}

double cross_entropy(const ProbMap& pred, const LabelMap3D& target, std::span<const double> weights,
                     double clamp) {
  check_pair(pred, target);
  check_weights(weights, pred.classes());
  const std::int64_t n = pred.voxels();
  return par::blocked_sum(n, [&](std::int64_t v) {
           const std::int32_t lab = target.labels()[static_cast<std::size_t>(v)];
           const double p = std::max(static_cast<double>(pred.prob(lab, v)), clamp);
           return -weights[static_cast<std::size_t>(lab)] * std::log(p);
         }) /
         static_cast<double>(n);
}

double shape_consistency_loss(const ProbMap& pred, const LabelMap3D& target,
                              std::span<const double> weights) {
  return (1.0 - soft_dice(pred, target).mean) + cross_entropy(pred, target, weights);
}

double l1_loss(const Volume3D& a, const Volume3D& b) {
  if (!(a.dims() == b.dims())) throw Error(Errc::dims_mismatch, "l1_loss: volumes have different dims");
  const std::int64_t n = a.size();
  return par::blocked_sum(n, [&](std::int64_t i) {
           return std::abs(static_cast<double>(a.data()[static_cast<std::size_t>(i)]) -
                           static_cast<double>(b.data()[static_cast<std::size_t>(i)]));
         }) /
         static_cast<double>(n);
}

namespace {

double l1_onehot_loss(const ProbMap& pred, const LabelMap3D& target) {
  const std::int64_t n = pred.voxels();
  const int classes = pred.classes();
  double acc = 0.0;
  for (int c = 0; c < classes; ++c) {
    acc += par::blocked_sum(n, [&](std::int64_t v) {
      const double t = target.labels()[static_cast<std::size_t>(v)] == c ? 1.0 : 0.0;
      return std::abs(static_cast<double>(pred.prob(c, v)) - t);
    });
  }
  return acc / static_cast<double>(n * classes);
}

double eval_loss(LossKind kind, const ProbMap& pred, const LabelMap3D& target,
                 std::span<const double> weights) {
  switch (kind) {
    case LossKind::soft_dice: return soft_dice(pred, target).mean;
    case LossKind::cross_entropy: return cross_entropy(pred, target, weights);
    case LossKind::shape_consistency: return shape_consistency_loss(pred, target, weights);
    case LossKind::l1_onehot: return l1_onehot_loss(pred, target);
  }
  throw Error(Errc::invalid_argument, "unknown loss kind");
}

// Analytic gradient w.r.t. every probability component, same scalar as
// eval_loss. Laid out like the ProbMap data (C planes).
std::vector<double> analytic_grad(LossKind kind, const ProbMap& pred, const LabelMap3D& target,
                                  std::span<const double> weights) {
  const std::int64_t n = pred.voxels();
  const int classes = pred.classes();
  std::vector<double> grad(static_cast<std::size_t>(n) * classes, 0.0);

  if (kind == LossKind::soft_dice || kind == LossKind::shape_consistency) {
    const double sign = kind == LossKind::soft_dice ? 1.0 : -1.0;  // SC uses 1 - dice
    for (int c = 1; c < classes; ++c) {
      double inter = 0.0, psum = 0.0, tsum = 0.0;
      for (std::int64_t v = 0; v < n; ++v) {
        const double t = target.labels()[static_cast<std::size_t>(v)] == c ? 1.0 : 0.0;
        inter += pred.prob(c, v) * t;
        psum += pred.prob(c, v);
        tsum += t;
      }
      const double num = 2.0 * inter + kDiceSmooth;
      const double den = psum + tsum + kDiceSmooth;
      for (std::int64_t v = 0; v < n; ++v) {
        const double t = target.labels()[static_cast<std::size_t>(v)] == c ? 1.0 : 0.0;
        const double d_dice = (2.0 * t * den - num) / (den * den);
        grad[static_cast<std::size_t>(c) * static_cast<std::size_t>(n) + static_cast<std::size_t>(v)] +=
            sign * d_dice / static_cast<double>(classes - 1);
      }
    }
  }
  if (kind == LossKind::cross_entropy || kind == LossKind::shape_consistency) {
    for (std::int64_t v = 0; v < n; ++v) {
      const std::int32_t lab = target.labels()[static_cast<std::size_t>(v)];
      const double p = std::max(static_cast<double>(pred.prob(lab, v)), kCeClamp);
      grad[static_cast<std::size_t>(lab) * static_cast<std::size_t>(n) + static_cast<std::size_t>(v)] +=
          -weights[static_cast<std::size_t>(lab)] / (p * static_cast<double>(n));
    }
  }
  if (kind == LossKind::l1_onehot) {
    for (int c = 0; c < classes; ++c) {
      for (std::int64_t v = 0; v < n; ++v) {
        const double t = target.labels()[static_cast<std::size_t>(v)] == c ? 1.0 : 0.0;
        const double diff = static_cast<double>(pred.prob(c, v)) - t;
        grad[static_cast<std::size_t>(c) * static_cast<std::size_t>(n) + static_cast<std::size_t>(v)] =
            (diff > 0.0 ? 1.0 : -1.0) / static_cast<double>(n * classes);
      }
    }
  }
  return grad;
}

}  // namespace

double grad_check(LossKind kind, const ProbMap& pred, const LabelMap3D& target,
                  std::span<const double> weights, double h) {
  check_pair(pred, target);
  if (kind == LossKind::cross_entropy || kind == LossKind::shape_consistency)
    check_weights(weights, pred.classes());
  if (!(h > 0.0)) throw Error(Errc::invalid_argument, "grad_check: h must be positive");
  for (float p : pred.data()) {
    if (static_cast<double>(p) <= 10.0 * h)
      throw Error(Errc::boundary_point,
                  "grad_check: probability " + std::to_string(p) + " too close to the simplex boundary");
  }

  const auto grad = analytic_grad(kind, pred, target, weights);
  std::vector<float> probe = pred.data();
  double worst = 0.0;
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const float original = probe[i];
    const float hi = static_cast<float>(original + h);
    const float lo = static_cast<float>(original - h);
    probe[i] = hi;
    const double up = eval_loss(kind, ProbMap::unchecked(pred.dims(), pred.classes(), probe), target, weights);
    probe[i] = lo;
    const double down = eval_loss(kind, ProbMap::unchecked(pred.dims(), pred.classes(), probe), target, weights);
    probe[i] = original;
    // Divide by the realized step: float storage quantizes original +/- h.
    const double fd = (up - down) / (static_cast<double>(hi) - static_cast<double>(lo));
    const double denom = std::max({std::abs(grad[i]), std::abs(fd), 1e-8});
    worst = std::max(worst, std::abs(grad[i] - fd) / denom);
  }
  return worst;
}

}  // namespace synthlab
