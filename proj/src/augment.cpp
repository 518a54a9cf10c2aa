#include "synthlab/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <json.hpp>

#include "synthlab/parallel.hpp"
#include "synthlab/rng.hpp"
#include "synthlab/smooth.hpp"

namespace synthlab {

using json = nlohmann::json;

const char* augment_op_name(AugmentOpKind k) {
  switch (k) {
    case AugmentOpKind::flip: return "flip";
    case AugmentOpKind::affine: return "affine";
    case AugmentOpKind::elastic: return "elastic";
    case AugmentOpKind::noise: return "noise";
    case AugmentOpKind::blur: return "blur";
    case AugmentOpKind::gamma: return "gamma";
    case AugmentOpKind::bias_field: return "bias_field";
  }
  return "unknown";
}

namespace {

AugmentOpKind op_kind_from_name(const std::string& name) {
  for (AugmentOpKind k : {AugmentOpKind::flip, AugmentOpKind::affine, AugmentOpKind::elastic,
                          AugmentOpKind::noise, AugmentOpKind::blur, AugmentOpKind::gamma,
                          AugmentOpKind::bias_field}) {
    if (name == augment_op_name(k)) return k;
  }
  throw Error(Errc::invalid_argument, "unknown augment op \"" + name + "\"");
}

void require_range(bool ok, const std::string& what) {
  if (!ok) throw Error(Errc::invalid_range, "augment config: " + what);
}

void validate_config(const AugmentConfig& c) {
  for (double p : {c.p_flip[0], c.p_flip[1], c.p_flip[2], c.p_affine, c.p_elastic, c.p_noise, c.p_blur,
                   c.p_gamma, c.p_bias})
    require_range(p >= 0.0 && p <= 1.0, "probabilities must lie in [0, 1]");
  require_range(c.rotate_max_deg >= 0.0, "rotate_max_deg must be >= 0");
  require_range(c.scale_min <= c.scale_max && c.scale_min > 0.0, "scale range invalid");
  require_range(c.translate_max_mm >= 0.0, "translate_max_mm must be >= 0");
  require_range(c.elastic_alpha_max >= 0.0, "elastic_alpha_max must be >= 0");
  require_range(c.elastic_sigma > 0.0, "elastic_sigma must be > 0");
  require_range(c.elastic_grid_step >= 2, "elastic_grid_step must be >= 2");
  require_range(c.noise_sigma_max >= 0.0, "noise_sigma_max must be >= 0");
  require_range(c.blur_sigma_max >= 0.0, "blur_sigma_max must be >= 0");
  require_range(c.gamma_min <= c.gamma_max && c.gamma_min > 0.0, "gamma range invalid");
  require_range(c.bias_order >= 1, "bias_order must be >= 1");
  require_range(c.bias_amplitude_max >= 0.0 && c.bias_amplitude_max < 1.0,
                "bias_amplitude_max must lie in [0, 1)");
}

double uniform_in(SplitMix64& rng, double lo, double hi) { return lo + (hi - lo) * rng.next_double(); }

}  // namespace

AugmentPlan sample_plan(std::uint64_t seed, const AugmentConfig& config) {
  validate_config(config);
  SplitMix64 rng(seed);
  AugmentPlan plan;
  plan.seed = seed;

  {
    std::array<bool, 3> axes{};
    bool any = false;
    for (int a = 0; a < 3; ++a) {
      axes[static_cast<std::size_t>(a)] = rng.next_double() < config.p_flip[static_cast<std::size_t>(a)];
      any = any || axes[static_cast<std::size_t>(a)];
    }
    if (any) {
      AugmentOp op;
      op.kind = AugmentOpKind::flip;
      op.flip_axes = axes;
      plan.ops.push_back(op);
    }
  }
  if (rng.next_double() < config.p_affine) {
    AugmentOp op;
    op.kind = AugmentOpKind::affine;
    for (int a = 0; a < 3; ++a)
      op.rotate_deg[static_cast<std::size_t>(a)] = uniform_in(rng, -config.rotate_max_deg, config.rotate_max_deg);
    op.scale = uniform_in(rng, config.scale_min, config.scale_max);
    for (int a = 0; a < 3; ++a)
      op.translate_mm[static_cast<std::size_t>(a)] = uniform_in(rng, -config.translate_max_mm, config.translate_max_mm);
    plan.ops.push_back(op);
  }
  if (rng.next_double() < config.p_elastic) {
    AugmentOp op;
    op.kind = AugmentOpKind::elastic;
    op.elastic_alpha = uniform_in(rng, 0.0, config.elastic_alpha_max);
    op.elastic_sigma = config.elastic_sigma;
    op.elastic_grid_step = config.elastic_grid_step;
    op.field_seed = rng.next_u64();
    plan.ops.push_back(op);
  }
  if (rng.next_double() < config.p_noise) {
    AugmentOp op;
    op.kind = AugmentOpKind::noise;
    op.sigma = uniform_in(rng, 0.0, config.noise_sigma_max);
    op.field_seed = rng.next_u64();
    plan.ops.push_back(op);
  }
  if (rng.next_double() < config.p_blur) {
    AugmentOp op;
    op.kind = AugmentOpKind::blur;
    op.sigma = uniform_in(rng, 0.0, config.blur_sigma_max);
    plan.ops.push_back(op);
  }
  if (rng.next_double() < config.p_gamma) {
    AugmentOp op;
    op.kind = AugmentOpKind::gamma;
    op.gamma = uniform_in(rng, config.gamma_min, config.gamma_max);
    plan.ops.push_back(op);
  }
  if (rng.next_double() < config.p_bias) {
    AugmentOp op;
    op.kind = AugmentOpKind::bias_field;
    op.bias_order = config.bias_order;
    op.bias_amplitude = uniform_in(rng, 0.0, config.bias_amplitude_max);
    op.field_seed = rng.next_u64();
    plan.ops.push_back(op);
  }
  return plan;
}

namespace {

struct Mat3 {
  std::array<double, 9> m;  // row-major

  std::array<double, 3> mul(const std::array<double, 3>& v) const {
    return {m[0] * v[0] + m[1] * v[1] + m[2] * v[2],
            m[3] * v[0] + m[4] * v[1] + m[5] * v[2],
            m[6] * v[0] + m[7] * v[1] + m[8] * v[2]};
  }

  Mat3 mul(const Mat3& o) const {
    Mat3 r{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double acc = 0.0;
        for (int k = 0; k < 3; ++k) acc += m[static_cast<std::size_t>(3 * i + k)] * o.m[static_cast<std::size_t>(3 * k + j)];
        r.m[static_cast<std::size_t>(3 * i + j)] = acc;
      }
    return r;
  }

  Mat3 transpose() const {
    return Mat3{{m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8]}};
  }
};

Mat3 rotation_matrix(const std::array<double, 3>& deg) {
  const double ax = deg[0] * std::numbers::pi / 180.0;
  const double ay = deg[1] * std::numbers::pi / 180.0;
  const double az = deg[2] * std::numbers::pi / 180.0;
  const Mat3 rx{{1, 0, 0, 0, std::cos(ax), -std::sin(ax), 0, std::sin(ax), std::cos(ax)}};
  const Mat3 ry{{std::cos(ay), 0, std::sin(ay), 0, 1, 0, -std::sin(ay), 0, std::cos(ay)}};
  const Mat3 rz{{std::cos(az), -std::sin(az), 0, std::sin(az), std::cos(az), 0, 0, 0, 1}};
  return rz.mul(ry).mul(rx);
}

// Continuous source voxel coordinate for each output voxel under the inverse
// affine map about the volume centre (in mm), or nullopt when out of bounds.
struct AffineMap {
  Mat3 rot_inv;
  double scale_inv;
  std::array<double, 3> translate;
  std::array<double, 3> centre;
  Spacing spacing;
  Dims dims;

  // Returns the source position in continuous voxel coordinates.
  std::array<double, 3> source_of(int x, int y, int z) const {
    const std::array<double, 3> out_mm{(x + 0.5) * spacing[0], (y + 0.5) * spacing[1], (z + 0.5) * spacing[2]};
    std::array<double, 3> rel{out_mm[0] - centre[0] - translate[0], out_mm[1] - centre[1] - translate[1],
                              out_mm[2] - centre[2] - translate[2]};
    rel = rot_inv.mul(rel);
    for (double& r : rel) r *= scale_inv;
    return {(rel[0] + centre[0]) / spacing[0] - 0.5, (rel[1] + centre[1]) / spacing[1] - 0.5,
            (rel[2] + centre[2]) / spacing[2] - 0.5};
  }
};

AffineMap make_affine_map(const AugmentOp& op, Dims dims, Spacing spacing) {
  AffineMap map;
  map.rot_inv = rotation_matrix(op.rotate_deg).transpose();
  map.scale_inv = 1.0 / op.scale;
  map.translate = op.translate_mm;
  map.centre = {0.5 * dims.nx * spacing[0], 0.5 * dims.ny * spacing[1], 0.5 * dims.nz * spacing[2]};
  map.spacing = spacing;
  map.dims = dims;
  return map;
}

bool in_bounds(const std::array<double, 3>& s, Dims d) {
  return s[0] > -0.5 && s[0] < d.nx - 0.5 && s[1] > -0.5 && s[1] < d.ny - 0.5 && s[2] > -0.5 &&
         s[2] < d.nz - 0.5;
}

float sample_trilinear_zero(const Volume3D& v, const std::array<double, 3>& s) {
  if (!in_bounds(s, v.dims())) return 0.0f;
  const Dims d = v.dims();
  const double cx = std::clamp(s[0], 0.0, static_cast<double>(d.nx - 1));
  const double cy = std::clamp(s[1], 0.0, static_cast<double>(d.ny - 1));
  const double cz = std::clamp(s[2], 0.0, static_cast<double>(d.nz - 1));
  const int x0 = static_cast<int>(std::floor(cx)), y0 = static_cast<int>(std::floor(cy)),
            z0 = static_cast<int>(std::floor(cz));
  const int x1 = std::min(x0 + 1, d.nx - 1), y1 = std::min(y0 + 1, d.ny - 1), z1 = std::min(z0 + 1, d.nz - 1);
  const double fx = cx - x0, fy = cy - y0, fz = cz - z0;
  const double c00 = v.at(x0, y0, z0) * (1 - fx) + v.at(x1, y0, z0) * fx;
  const double c10 = v.at(x0, y1, z0) * (1 - fx) + v.at(x1, y1, z0) * fx;
  const double c01 = v.at(x0, y0, z1) * (1 - fx) + v.at(x1, y0, z1) * fx;
  const double c11 = v.at(x0, y1, z1) * (1 - fx) + v.at(x1, y1, z1) * fx;
  return static_cast<float>((c00 * (1 - fy) + c10 * fy) * (1 - fz) + (c01 * (1 - fy) + c11 * fy) * fz);
}

std::int32_t sample_nearest_zero(const LabelMap3D& m, const std::array<double, 3>& s) {
  if (!in_bounds(s, m.dims())) return 0;
  const Dims d = m.dims();
  const int x = std::clamp(static_cast<int>(std::floor(s[0] + 0.5)), 0, d.nx - 1);
  const int y = std::clamp(static_cast<int>(std::floor(s[1] + 0.5)), 0, d.ny - 1);
  const int z = std::clamp(static_cast<int>(std::floor(s[2] + 0.5)), 0, d.nz - 1);
  return m.at(x, y, z);
}

double trilinear_clamped(const std::vector<float>& data, Dims d, double sx, double sy, double sz) {
  sx = std::clamp(sx, 0.0, static_cast<double>(d.nx - 1));
  sy = std::clamp(sy, 0.0, static_cast<double>(d.ny - 1));
  sz = std::clamp(sz, 0.0, static_cast<double>(d.nz - 1));
  const int x0 = static_cast<int>(std::floor(sx)), y0 = static_cast<int>(std::floor(sy)),
            z0 = static_cast<int>(std::floor(sz));
  const int x1 = std::min(x0 + 1, d.nx - 1), y1 = std::min(y0 + 1, d.ny - 1), z1 = std::min(z0 + 1, d.nz - 1);
  const double fx = sx - x0, fy = sy - y0, fz = sz - z0;
  const auto at = [&](int x, int y, int z) {
    return static_cast<double>(
        data[static_cast<std::size_t>(x + static_cast<std::int64_t>(d.nx) * (y + static_cast<std::int64_t>(d.ny) * z))]);
  };
  const double c00 = at(x0, y0, z0) * (1 - fx) + at(x1, y0, z0) * fx;
  const double c10 = at(x0, y1, z0) * (1 - fx) + at(x1, y1, z0) * fx;
  const double c01 = at(x0, y0, z1) * (1 - fx) + at(x1, y0, z1) * fx;
  const double c11 = at(x0, y1, z1) * (1 - fx) + at(x1, y1, z1) * fx;
  return (c00 * (1 - fy) + c10 * fy) * (1 - fz) + (c01 * (1 - fy) + c11 * fy) * fz;
}

// Coarse random displacement field, Gaussian-smoothed in grid cells, scaled
// by alpha and trilinearly upsampled at lookup time.
struct ElasticField {
  Dims grid;
  int step;
  double alpha;
  std::array<std::vector<float>, 3> channel;

  std::array<double, 3> displacement(int x, int y, int z) const {
    const double gx = static_cast<double>(x) / step;
    const double gy = static_cast<double>(y) / step;
    const double gz = static_cast<double>(z) / step;
    std::array<double, 3> d{};
    for (int c = 0; c < 3; ++c)
      d[static_cast<std::size_t>(c)] =
          alpha * trilinear_clamped(channel[static_cast<std::size_t>(c)], grid, gx, gy, gz);
    return d;
  }
};

ElasticField make_elastic_field(const AugmentOp& op, Dims dims) {
  ElasticField f;
  f.step = op.elastic_grid_step;
  f.alpha = op.elastic_alpha;
  f.grid = {static_cast<int>(dims.nx / f.step) + 2, static_cast<int>(dims.ny / f.step) + 2,
            static_cast<int>(dims.nz / f.step) + 2};
  const auto n = static_cast<std::size_t>(f.grid.count());
  for (int c = 0; c < 3; ++c) {
    std::vector<float> raw(n);
    for (std::size_t i = 0; i < n; ++i)
      raw[i] = static_cast<float>(hash_gaussian(op.field_seed + static_cast<std::uint64_t>(c), i));
    const Volume3D smoothed = gaussian_smooth(Volume3D(f.grid, {1, 1, 1}, std::move(raw)), op.elastic_sigma);
    f.channel[static_cast<std::size_t>(c)] = smoothed.data();
  }
  return f;
}

// Monomial exponents (a+b+c <= order) in lexicographic order.
std::vector<std::array<int, 3>> bias_terms(int order) {
  std::vector<std::array<int, 3>> terms;
  for (int a = 0; a <= order; ++a)
    for (int b = 0; a + b <= order; ++b)
      for (int c = 0; a + b + c <= order; ++c) terms.push_back({a, b, c});
  return terms;
}

}  // namespace

std::pair<Volume3D, std::optional<LabelMap3D>> apply(const AugmentPlan& plan, const Volume3D& v,
                                                     const std::optional<LabelMap3D>& mask) {
  if (mask && !(mask->dims() == v.dims()))
    throw Error(Errc::dims_mismatch, "augment: mask dims differ from volume dims");

  Volume3D vol = v;
  std::optional<LabelMap3D> lab = mask;
  const Dims d = v.dims();
  const std::int64_t n = d.count();

  for (const AugmentOp& op : plan.ops) {
    switch (op.kind) {
      case AugmentOpKind::flip: {
        std::vector<float> out(static_cast<std::size_t>(n));
        const Volume3D src = vol;
        par::parallel_for(n, [&](std::int64_t i) {
          const int x = static_cast<int>(i % d.nx);
          const int y = static_cast<int>((i / d.nx) % d.ny);
          const int z = static_cast<int>(i / (static_cast<std::int64_t>(d.nx) * d.ny));
          out[static_cast<std::size_t>(i)] = src.at(op.flip_axes[0] ? d.nx - 1 - x : x,
                                                    op.flip_axes[1] ? d.ny - 1 - y : y,
                                                    op.flip_axes[2] ? d.nz - 1 - z : z);
        });
        vol = Volume3D(d, vol.spacing(), std::move(out));
        if (lab) {
          std::vector<std::int32_t> lout(static_cast<std::size_t>(n));
          const LabelMap3D lsrc = *lab;
          par::parallel_for(n, [&](std::int64_t i) {
            const int x = static_cast<int>(i % d.nx);
            const int y = static_cast<int>((i / d.nx) % d.ny);
            const int z = static_cast<int>(i / (static_cast<std::int64_t>(d.nx) * d.ny));
            lout[static_cast<std::size_t>(i)] = lsrc.at(op.flip_axes[0] ? d.nx - 1 - x : x,
                                                        op.flip_axes[1] ? d.ny - 1 - y : y,
                                                        op.flip_axes[2] ? d.nz - 1 - z : z);
          });
          lab = LabelMap3D(d, lab->spacing(), std::move(lout));
        }
        break;
      }
      case AugmentOpKind::affine: {
        const AffineMap map = make_affine_map(op, d, vol.spacing());
        std::vector<float> out(static_cast<std::size_t>(n));
        const Volume3D src = vol;
        par::parallel_for(n, [&](std::int64_t i) {
          const int x = static_cast<int>(i % d.nx);
          const int y = static_cast<int>((i / d.nx) % d.ny);
          const int z = static_cast<int>(i / (static_cast<std::int64_t>(d.nx) * d.ny));
          out[static_cast<std::size_t>(i)] = sample_trilinear_zero(src, map.source_of(x, y, z));
        });
        vol = Volume3D(d, vol.spacing(), std::move(out));
        if (lab) {
          std::vector<std::int32_t> lout(static_cast<std::size_t>(n));
          const LabelMap3D lsrc = *lab;
          par::parallel_for(n, [&](std::int64_t i) {
            const int x = static_cast<int>(i % d.nx);
            const int y = static_cast<int>((i / d.nx) % d.ny);
            const int z = static_cast<int>(i / (static_cast<std::int64_t>(d.nx) * d.ny));
            lout[static_cast<std::size_t>(i)] = sample_nearest_zero(lsrc, map.source_of(x, y, z));
          });
          lab = LabelMap3D(d, lab->spacing(), std::move(lout));
        }
        break;
      }
      case AugmentOpKind::elastic: {
        const ElasticField field = make_elastic_field(op, d);
        std::vector<float> out(static_cast<std::size_t>(n));
        const Volume3D src = vol;
        par::parallel_for(n, [&](std::int64_t i) {
          const int x = static_cast<int>(i % d.nx);
          const int y = static_cast<int>((i / d.nx) % d.ny);
          const int z = static_cast<int>(i / (static_cast<std::int64_t>(d.nx) * d.ny));
          const auto disp = field.displacement(x, y, z);
          out[static_cast<std::size_t>(i)] =
              sample_trilinear_zero(src, {x + disp[0], y + disp[1], z + disp[2]});
        });
        vol = Volume3D(d, vol.spacing(), std::move(out));
        if (lab) {
          std::vector<std::int32_t> lout(static_cast<std::size_t>(n));
          const LabelMap3D lsrc = *lab;
          par::parallel_for(n, [&](std::int64_t i) {
            const int x = static_cast<int>(i % d.nx);
            const int y = static_cast<int>((i / d.nx) % d.ny);
            const int z = static_cast<int>(i / (static_cast<std::int64_t>(d.nx) * d.ny));
            const auto disp = field.displacement(x, y, z);
            lout[static_cast<std::size_t>(i)] =
                sample_nearest_zero(lsrc, {x + disp[0], y + disp[1], z + disp[2]});
          });
          lab = LabelMap3D(d, lab->spacing(), std::move(lout));
        }
        break;
      }
      case AugmentOpKind::noise: {
        std::vector<float> out(static_cast<std::size_t>(n));
        par::parallel_for(n, [&](std::int64_t i) {
          out[static_cast<std::size_t>(i)] = static_cast<float>(
              vol.data()[static_cast<std::size_t>(i)] +
              op.sigma * hash_gaussian(op.field_seed, static_cast<std::uint64_t>(i)));
        });
        vol = Volume3D(d, vol.spacing(), std::move(out));
        break;
      }
      case AugmentOpKind::blur: {
        vol = gaussian_smooth(vol, op.sigma);
        break;
      }
      case AugmentOpKind::gamma: {
        for (float x : vol.data()) {
          if (x < 0.0f || x > 1.0f)
            throw Error(Errc::unnormalized_input,
                        "gamma correction requires intensities in [0, 1], found " + std::to_string(x));
        }
        std::vector<float> out(static_cast<std::size_t>(n));
        par::parallel_for(n, [&](std::int64_t i) {
          out[static_cast<std::size_t>(i)] =
              static_cast<float>(std::pow(static_cast<double>(vol.data()[static_cast<std::size_t>(i)]), op.gamma));
        });
        vol = Volume3D(d, vol.spacing(), std::move(out));
        break;
      }
      case AugmentOpKind::bias_field: {
        const auto terms = bias_terms(op.bias_order);
        std::vector<double> coef(terms.size());
        SplitMix64 rng(op.field_seed);
        double coef_norm = 0.0;
        for (std::size_t t = 0; t < terms.size(); ++t) {
          coef[t] = 2.0 * rng.next_double() - 1.0;
          coef_norm += std::abs(coef[t]);
        }
        // |poly| <= sum |coef| on [-1,1]^3, so the field stays within
        // 1 +/- amplitude.
        const double inv_norm = coef_norm > 0.0 ? 1.0 / coef_norm : 0.0;
        std::vector<float> out(static_cast<std::size_t>(n));
        par::parallel_for(n, [&](std::int64_t i) {
          const int x = static_cast<int>(i % d.nx);
          const int y = static_cast<int>((i / d.nx) % d.ny);
          const int z = static_cast<int>(i / (static_cast<std::int64_t>(d.nx) * d.ny));
          const double u = 2.0 * (x + 0.5) / d.nx - 1.0;
          const double w = 2.0 * (y + 0.5) / d.ny - 1.0;
          const double q = 2.0 * (z + 0.5) / d.nz - 1.0;
          double poly = 0.0;
          for (std::size_t t = 0; t < terms.size(); ++t) {
            poly += coef[t] * std::pow(u, terms[t][0]) * std::pow(w, terms[t][1]) * std::pow(q, terms[t][2]);
          }
          const double field = 1.0 + op.bias_amplitude * poly * inv_norm;
          out[static_cast<std::size_t>(i)] =
              static_cast<float>(vol.data()[static_cast<std::size_t>(i)] * field);
        });
        vol = Volume3D(d, vol.spacing(), std::move(out));
        break;
      }
    }
  }
  return {std::move(vol), std::move(lab)};
}

std::string AugmentPlan::to_json() const {
  json ops_json = json::array();
  for (const AugmentOp& op : ops) {
    json j = {{"kind", augment_op_name(op.kind)}};
    switch (op.kind) {
      case AugmentOpKind::flip:
        j["axes"] = {op.flip_axes[0], op.flip_axes[1], op.flip_axes[2]};
        break;
      case AugmentOpKind::affine:
        j["rotate_deg"] = {op.rotate_deg[0], op.rotate_deg[1], op.rotate_deg[2]};
        j["scale"] = op.scale;
        j["translate_mm"] = {op.translate_mm[0], op.translate_mm[1], op.translate_mm[2]};
        break;
      case AugmentOpKind::elastic:
        j["alpha"] = op.elastic_alpha;
        j["sigma"] = op.elastic_sigma;
        j["grid_step"] = op.elastic_grid_step;
        j["field_seed"] = op.field_seed;
        break;
      case AugmentOpKind::noise:
        j["sigma"] = op.sigma;
        j["field_seed"] = op.field_seed;
        break;
      case AugmentOpKind::blur:
        j["sigma"] = op.sigma;
        break;
      case AugmentOpKind::gamma:
        j["gamma"] = op.gamma;
        break;
      case AugmentOpKind::bias_field:
        j["order"] = op.bias_order;
        j["amplitude"] = op.bias_amplitude;
        j["field_seed"] = op.field_seed;
        break;
    }
    ops_json.push_back(std::move(j));
  }
  return json{{"seed", seed}, {"ops", std::move(ops_json)}}.dump(2) + "\n";
}

AugmentPlan AugmentPlan::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::invalid_argument, std::string("augment plan: ") + e.what());
  }
  AugmentPlan plan;
  try {
    plan.seed = j.at("seed").get<std::uint64_t>();
    for (const json& oj : j.at("ops")) {
      AugmentOp op;
      op.kind = op_kind_from_name(oj.at("kind").get<std::string>());
      switch (op.kind) {
        case AugmentOpKind::flip: {
          const auto axes = oj.at("axes").get<std::vector<bool>>();
          if (axes.size() != 3) throw Error(Errc::invalid_argument, "augment plan: flip axes need 3 entries");
          op.flip_axes = {axes[0], axes[1], axes[2]};
          break;
        }
        case AugmentOpKind::affine: {
          const auto rot = oj.at("rotate_deg").get<std::vector<double>>();
          const auto tr = oj.at("translate_mm").get<std::vector<double>>();
          if (rot.size() != 3 || tr.size() != 3)
            throw Error(Errc::invalid_argument, "augment plan: affine vectors need 3 entries");
          op.rotate_deg = {rot[0], rot[1], rot[2]};
          op.translate_mm = {tr[0], tr[1], tr[2]};
          op.scale = oj.at("scale").get<double>();
          break;
        }
        case AugmentOpKind::elastic:
          op.elastic_alpha = oj.at("alpha").get<double>();
          op.elastic_sigma = oj.at("sigma").get<double>();
          op.elastic_grid_step = oj.at("grid_step").get<int>();
          op.field_seed = oj.at("field_seed").get<std::uint64_t>();
          break;
        case AugmentOpKind::noise:
          op.sigma = oj.at("sigma").get<double>();
          op.field_seed = oj.at("field_seed").get<std::uint64_t>();
          break;
        case AugmentOpKind::blur:
          op.sigma = oj.at("sigma").get<double>();
          break;
        case AugmentOpKind::gamma:
          op.gamma = oj.at("gamma").get<double>();
          break;
        case AugmentOpKind::bias_field:
          op.bias_order = oj.at("order").get<int>();
          op.bias_amplitude = oj.at("amplitude").get<double>();
          op.field_seed = oj.at("field_seed").get<std::uint64_t>();
          break;
      }
      plan.ops.push_back(op);
    }
  } catch (const json::exception& e) {
    throw Error(Errc::invalid_argument, std::string("augment plan: ") + e.what());
  }
  return plan;
}

AugmentConfig AugmentConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::invalid_argument, std::string("augment config: ") + e.what());
  }
  AugmentConfig c;
  const auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) {
      try {
        field = j.at(key).get<std::decay_t<decltype(field)>>();
      } catch (const json::exception& e) {
        throw Error(Errc::invalid_argument, std::string("augment config key \"") + key + "\": " + e.what());
      }
      j.erase(key);
    }
  };
  if (j.contains("p_flip")) {
    const auto p = j.at("p_flip").get<std::vector<double>>();
    if (p.size() != 3) throw Error(Errc::invalid_argument, "augment config: p_flip needs 3 entries");
    c.p_flip = {p[0], p[1], p[2]};
    j.erase("p_flip");
  }
  get("p_affine", c.p_affine);
  get("rotate_max_deg", c.rotate_max_deg);
  get("scale_min", c.scale_min);
  get("scale_max", c.scale_max);
  get("translate_max_mm", c.translate_max_mm);
  get("p_elastic", c.p_elastic);
  get("elastic_alpha_max", c.elastic_alpha_max);
  get("elastic_sigma", c.elastic_sigma);
  get("elastic_grid_step", c.elastic_grid_step);
  get("p_noise", c.p_noise);
  get("noise_sigma_max", c.noise_sigma_max);
  get("p_blur", c.p_blur);
  get("blur_sigma_max", c.blur_sigma_max);
  get("p_gamma", c.p_gamma);
  get("gamma_min", c.gamma_min);
  get("gamma_max", c.gamma_max);
  get("p_bias", c.p_bias);
  get("bias_order", c.bias_order);
  get("bias_amplitude_max", c.bias_amplitude_max);
  for (const auto& [key, _] : j.items())
    throw Error(Errc::invalid_argument, "augment config: unknown key \"" + key + "\"");
  validate_config(c);
  return c;
}

}  // namespace synthlab
