// Times the OpenMP kernels against their single-threaded references and
// checks that both paths agree on the result.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

#include "synthlab/kmeans.hpp"
#include "synthlab/metrics.hpp"
#include "synthlab/parallel.hpp"
#include "synthlab/resample.hpp"
#include "synthlab/rng.hpp"
#include "synthlab/serial_ref.hpp"
#include "synthlab/smooth.hpp"

using namespace synthlab;

namespace {

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

template <class F>
double time_ms(F&& fn, int repeats = 3) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const double t0 = now_ms();
    fn();
    best = std::min(best, now_ms() - t0);
  }
  return best;
}

Volume3D random_volume(Dims dims, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<float> data(static_cast<std::size_t>(dims.count()));
  for (auto& v : data) v = static_cast<float>(rng.next_double());
  return Volume3D(dims, {1.0, 1.0, 1.0}, std::move(data));
}

void report(const char* name, double serial_ms, double omp_ms, double max_diff) {
  std::printf("%-18s serial %9.2f ms   omp %9.2f ms   speedup %5.2fx   max|diff| %.3g\n", name,
              serial_ms, omp_ms, serial_ms / omp_ms, max_diff);
}

double max_abs_diff(const std::vector<float>& a, const std::vector<float>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(static_cast<double>(a[i]) - b[i]));
  return m;
}

}  // namespace

int main() {
  std::printf("threads available: %d\n\n", par::max_threads());
  const Volume3D v = random_volume({128, 128, 64}, 42);

  {
    Volume3D a = Volume3D::zeros({1, 1, 1}), b = a;
    const double ts = time_ms([&] { a = serial::gaussian_smooth(v, 1.0); });
    const double tp = time_ms([&] { b = gaussian_smooth(v, 1.0); });
    report("gaussian_smooth", ts, tp, max_abs_diff(a.data(), b.data()));
  }
  {
    Volume3D a = Volume3D::zeros({1, 1, 1}), b = a;
    const double ts = time_ms([&] { a = serial::resample(v, {96, 96, 48}, {1, 1, 1}, Interp::trilinear); });
    const double tp = time_ms([&] { b = resample(v, {96, 96, 48}, {1, 1, 1}, Interp::trilinear); });
    report("resample", ts, tp, max_abs_diff(a.data(), b.data()));
  }
  {
    const Volume3D v2 = random_volume({128, 128, 64}, 43);
    double a = 0.0, b = 0.0;
    const double ts = time_ms([&] { a = serial::psnr(v, v2, 1.0); });
    const double tp = time_ms([&] { b = psnr(v, v2, 1.0); });
    report("psnr", ts, tp, std::abs(a - b));
  }
  {
    const Volume3D v2 = random_volume({128, 128, 64}, 44);
    double a = 0.0, b = 0.0;
    const double ts = time_ms([&] { a = serial::ms_ssim(v, v2); }, 1);
    const double tp = time_ms([&] { b = ms_ssim(v, v2); }, 1);
    report("ms_ssim", ts, tp, std::abs(a - b));
  }
  {
    std::vector<double> a, b;
    const double ts = time_ms([&] { a = serial::extract_features(v); });
    const double tp = time_ms([&] { b = extract_features(v); });
    double diff = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) diff = std::max(diff, std::abs(a[i] - b[i]));
    report("extract_features", ts, tp, diff);
  }
  {
    double diff = 0.0;
    const double ts = time_ms([&] { (void)serial::kmeans(v, 3, 7); }, 1);
    const double tp = time_ms([&] { (void)kmeans(v, 3, 7); }, 1);
    const ClusterModel ma = serial::kmeans(v, 3, 7);
    const ClusterModel mb = kmeans(v, 3, 7);
    for (int c = 0; c < 3; ++c)
      diff = std::max(diff, std::abs(ma.centroids[static_cast<std::size_t>(c)] -
                                     mb.centroids[static_cast<std::size_t>(c)]));
    report("kmeans(k=3)", ts, tp, diff);
  }
  return 0;
}
