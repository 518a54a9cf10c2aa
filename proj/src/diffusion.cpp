#include "synthlab/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>

#include "synthlab/parallel.hpp"
#include "synthlab/volume_io.hpp"

namespace synthlab {

NoiseSchedule cosine_schedule(int steps, double offset) {
  if (steps < 1) throw Error(Errc::invalid_argument, "cosine_schedule: steps must be >= 1");
  if (!(offset > 0.0)) throw Error(Errc::invalid_argument, "cosine_schedule: offset must be > 0");

  const auto f = [&](double t) {
    const double arg = ((t / steps + offset) / (1.0 + offset)) * std::numbers::pi / 2.0;
    const double c = std::cos(arg);
    return c * c;
  };
  const double f0 = f(0.0);

  NoiseSchedule s;
  s.steps = steps;
  s.beta.assign(static_cast<std::size_t>(steps) + 1, 0.0);
  s.alpha.assign(static_cast<std::size_t>(steps) + 1, 1.0);
  s.alpha_bar.assign(static_cast<std::size_t>(steps) + 1, 1.0);
  double prev_raw = 1.0;
  for (int t = 1; t <= steps; ++t) {
    const double raw = f(static_cast<double>(t)) / f0;
    const double beta = std::clamp(1.0 - raw / prev_raw, kBetaMin, kBetaMax);
    prev_raw = raw;
    s.beta[static_cast<std::size_t>(t)] = beta;
    s.alpha[static_cast<std::size_t>(t)] = 1.0 - beta;
    // Product form keeps alpha_bar[t] = alpha_bar[t-1] * alpha[t] exact.
    s.alpha_bar[static_cast<std::size_t>(t)] =
        s.alpha_bar[static_cast<std::size_t>(t) - 1] * s.alpha[static_cast<std::size_t>(t)];
  }
  return s;
}

LatentTensor LatentTensor::create(std::vector<std::uint32_t> shape, std::vector<float> data) {
  if (shape.empty()) throw Error(Errc::invalid_argument, "LatentTensor: rank must be >= 1");
  std::int64_t n = 1;
  for (auto d : shape) {
    if (d == 0) throw Error(Errc::invalid_argument, "LatentTensor: zero-sized dimension");
    n *= d;
  }
  if (static_cast<std::int64_t>(data.size()) != n)
    throw Error(Errc::invalid_argument, "LatentTensor: data length does not match shape");
  for (float v : data)
    if (!std::isfinite(v)) throw Error(Errc::invalid_argument, "LatentTensor: non-finite value");
  return LatentTensor{std::move(shape), std::move(data)};
}

namespace {

void check_same_shape(const LatentTensor& a, const LatentTensor& b, const char* what) {
  if (a.shape != b.shape) throw Error(Errc::shape_mismatch, std::string(what) + ": tensor shapes differ");
}

}  // namespace

LatentTensor forward_noise(const LatentTensor& z, int t, const NoiseSchedule& sched,
                           const LatentTensor& eps) {
  check_same_shape(z, eps, "forward_noise");
  if (t < 0 || t > sched.steps)
    throw Error(Errc::step_out_of_range,
                "forward_noise: t=" + std::to_string(t) + " outside [0, " + std::to_string(sched.steps) + "]");
  const double ab = sched.alpha_bar[static_cast<std::size_t>(t)];
  const double sa = std::sqrt(ab);
  const double sb = std::sqrt(1.0 - ab);
  LatentTensor out{z.shape, std::vector<float>(z.data.size())};
  par::parallel_for(z.size(), [&](std::int64_t i) {
    out.data[static_cast<std::size_t>(i)] =
        static_cast<float>(sa * z.data[static_cast<std::size_t>(i)] + sb * eps.data[static_cast<std::size_t>(i)]);
  });
  return out;
}

double denoise_loss(const LatentTensor& eps_true, const LatentTensor& eps_pred) {
  check_same_shape(eps_true, eps_pred, "denoise_loss");
  const std::int64_t n = eps_true.size();
  return par::blocked_sum(n, [&](std::int64_t i) {
           const double d = static_cast<double>(eps_true.data[static_cast<std::size_t>(i)]) -
                            static_cast<double>(eps_pred.data[static_cast<std::size_t>(i)]);
           return d * d;
         }) /
         static_cast<double>(n);
}

LatentTensor cfg_blend(const LatentTensor& eps_uncond, const LatentTensor& eps_cond, double weight) {
  check_same_shape(eps_uncond, eps_cond, "cfg_blend");
  LatentTensor out{eps_uncond.shape, std::vector<float>(eps_uncond.data.size())};
  par::parallel_for(eps_uncond.size(), [&](std::int64_t i) {
    const double u = eps_uncond.data[static_cast<std::size_t>(i)];
    const double c = eps_cond.data[static_cast<std::size_t>(i)];
    out.data[static_cast<std::size_t>(i)] = static_cast<float>(u + weight * (c - u));
  });
  return out;
}

LatentTensor load_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_failure, "cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < 5 || std::memcmp(bytes.data(), "LTNS", 4) != 0)
    throw Error(Errc::malformed_tensor_file, path.string() + ": missing LTNS magic");
  const auto rank = static_cast<std::uint8_t>(bytes[4]);
  if (rank == 0 || rank > 8)
    throw Error(Errc::malformed_tensor_file, path.string() + ": rank " + std::to_string(rank) + " outside [1, 8]");
  const std::size_t header = 5 + 4 * static_cast<std::size_t>(rank);
  if (bytes.size() < header)
    throw Error(Errc::malformed_tensor_file, path.string() + ": truncated dim list");
  std::vector<std::uint32_t> shape(rank);
  std::int64_t n = 1;
  for (int i = 0; i < rank; ++i) {
    std::memcpy(&shape[static_cast<std::size_t>(i)], bytes.data() + 5 + 4 * i, 4);
    if (shape[static_cast<std::size_t>(i)] == 0)
      throw Error(Errc::malformed_tensor_file, path.string() + ": zero-sized dimension " + std::to_string(i));
    n *= shape[static_cast<std::size_t>(i)];
  }
  const std::size_t need = header + static_cast<std::size_t>(n) * 4;
  if (bytes.size() != need)
    throw Error(Errc::malformed_tensor_file, path.string() + ": expected " + std::to_string(need) +
                                                 " bytes, got " + std::to_string(bytes.size()));
  std::vector<float> data(static_cast<std::size_t>(n));
  std::memcpy(data.data(), bytes.data() + header, static_cast<std::size_t>(n) * 4);
  return LatentTensor::create(std::move(shape), std::move(data));
}

void save_tensor(const LatentTensor& t, const std::filesystem::path& path) {
  const auto rank = static_cast<std::uint8_t>(t.shape.size());
  std::string bytes(5 + 4 * static_cast<std::size_t>(rank) + t.data.size() * 4, '\0');
  std::memcpy(bytes.data(), "LTNS", 4);
  bytes[4] = static_cast<char>(rank);
  for (std::size_t i = 0; i < t.shape.size(); ++i) std::memcpy(bytes.data() + 5 + 4 * i, &t.shape[i], 4);
  std::memcpy(bytes.data() + 5 + 4 * static_cast<std::size_t>(rank), t.data.data(), t.data.size() * 4);
  atomic_write_bytes(path, bytes);
}

}  // namespace synthlab
