#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "synthlab/features.hpp"
#include "synthlab/fid.hpp"
#include "synthlab/metrics.hpp"
#include "synthlab/mmd.hpp"
#include "synthlab/rng.hpp"

using namespace synthlab;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  static const fs::path dir = [] {
    auto p = fs::temp_directory_path() / "synthlab_metric_tests";
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

// Random PSD matrix A = B^T B / d + eps I.
std::vector<double> random_psd(std::int64_t d, std::uint64_t seed, double eps = 0.05) {
  SplitMix64 rng(seed);
  std::vector<double> b(static_cast<std::size_t>(d * d));
  for (auto& v : b) v = 2.0 * rng.next_double() - 1.0;
  std::vector<double> a(static_cast<std::size_t>(d * d), 0.0);
  for (std::int64_t i = 0; i < d; ++i)
    for (std::int64_t j = 0; j < d; ++j) {
      double acc = 0.0;
      for (std::int64_t k = 0; k < d; ++k)
        acc += b[static_cast<std::size_t>(k * d + i)] * b[static_cast<std::size_t>(k * d + j)];
      a[static_cast<std::size_t>(i * d + j)] = acc / static_cast<double>(d) + (i == j ? eps : 0.0);
    }
  return a;
}

FeatureMoments make_moments(std::vector<double> mu, std::vector<double> sigma, std::int64_t d) {
  FeatureMoments m;
  m.mu = std::move(mu);
  m.sigma = std::move(sigma);
  m.d = d;
  m.n = 10;
  return m;
}

FeatureSet random_features(std::int64_t n, std::int64_t d, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<double> rows(static_cast<std::size_t>(n * d));
  for (auto& v : rows) v = 2.0 * rng.next_double() - 1.0;
  return FeatureSet::from_rows(n, d, std::move(rows));
}

}  // namespace

// ---------------------------------------------------------------- PSNR

TEST_CASE("psnr hits 20 dB for an exactly constructed 0.01 MSE") {
  // 48 diffs of 0.0625 and 52 of 0.125: dyadic squares summing to 1.0.
  std::vector<float> a(100, 0.0f), b(100);
  for (int i = 0; i < 100; ++i) b[static_cast<std::size_t>(i)] = i < 48 ? 0.0625f : 0.125f;
  const Volume3D va({10, 10, 1}, {1, 1, 1}, std::move(a));
  const Volume3D vb({10, 10, 1}, {1, 1, 1}, std::move(b));
  CHECK(std::abs(psnr(va, vb, 1.0) - 20.0) < 1e-9);
}

TEST_CASE("psnr of a uniform 0.1 offset is about 20 dB") {
  const Volume3D a = fixtures::random_volume({8, 8, 4}, 1, 0.0, 0.5);
  std::vector<float> shifted(a.data());
  for (float& x : shifted) x += 0.1f;
  const Volume3D b(a.dims(), a.spacing(), std::move(shifted));
  CHECK(psnr(a, b, 1.0) == doctest::Approx(20.0).epsilon(1e-5));
}

TEST_CASE("psnr of identical volumes is a distinct error, not a float") {
  const Volume3D a = fixtures::random_volume({4, 4, 4}, 2);
  try {
    psnr(a, a, 1.0);
    FAIL("expected ZeroMse");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::zero_mse);
  }
}

TEST_CASE("psnr decreases strictly as the perturbation grows") {
  const Volume3D a = fixtures::random_volume({8, 8, 8}, 3);
  double prev = 1e300;
  for (int s = 1; s <= 10; ++s) {
    std::vector<float> noisy(a.data());
    for (std::size_t i = 0; i < noisy.size(); ++i)
      noisy[i] += static_cast<float>(0.01 * s * (hash_uniform(77, i) - 0.5));
    const double val = psnr(a, Volume3D(a.dims(), a.spacing(), std::move(noisy)), 1.0);
    CHECK(val < prev);
    prev = val;
  }
}

// ---------------------------------------------------------------- MS-SSIM

TEST_CASE("ms_ssim self-similarity is exactly 1") {
  MsSsimConfig small;
  small.window = 7;
  const Volume3D a = fixtures::random_volume({32, 32, 32}, 4);
  CHECK(ms_ssim(a, a, small) == doctest::Approx(1.0).epsilon(1e-6));

  const Volume3D big = fixtures::random_volume({48, 48, 48}, 5);
  CHECK(ms_ssim(big, big) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("ms_ssim of two equal constants is 1") {
  const Volume3D a({48, 48, 48}, {1, 1, 1}, std::vector<float>(48 * 48 * 48, 0.3f));
  const Volume3D b = a;
  CHECK(ms_ssim(a, b) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("ms_ssim is symmetric") {
  MsSsimConfig small;
  small.window = 7;
  const Volume3D a = fixtures::random_volume({32, 32, 32}, 6);
  const Volume3D b = fixtures::random_volume({32, 32, 32}, 7);
  CHECK(ms_ssim(a, b, small) == doctest::Approx(ms_ssim(b, a, small)).epsilon(1e-6));
}

TEST_CASE("ms_ssim matches the direct-summation oracle") {
  MsSsimConfig small;
  small.window = 7;
  // Correlated pair: independent noise leaves the coarsest scale with a
  // near-zero contrast term where the score is ill-conditioned.
  const Volume3D a = fixtures::random_volume({32, 32, 32}, 8);
  std::vector<float> mixed(a.data());
  for (std::size_t i = 0; i < mixed.size(); ++i)
    mixed[i] = 0.6f * mixed[i] + static_cast<float>(0.4 * hash_uniform(9, i));
  const Volume3D b(a.dims(), a.spacing(), std::move(mixed));
  CHECK(ms_ssim(a, b, small) == doctest::Approx(oracle::msssim_direct(a, b, small)).epsilon(1e-5));

  // Correlated pair at the default window.
  const Volume3D base = fixtures::random_volume({48, 48, 48}, 10);
  std::vector<float> noisy(base.data());
  for (std::size_t i = 0; i < noisy.size(); ++i)
    noisy[i] += static_cast<float>(0.05 * (hash_uniform(5, i) - 0.5));
  const Volume3D pert(base.dims(), base.spacing(), std::move(noisy));
  const MsSsimConfig dflt;
  CHECK(ms_ssim(base, pert, dflt) == doctest::Approx(oracle::msssim_direct(base, pert, dflt)).epsilon(1e-5));
}

TEST_CASE("ms_ssim respects the renormalize flag") {
  MsSsimConfig cfg;
  cfg.window = 7;
  MsSsimConfig renorm = cfg;
  renorm.renormalize_weights = true;
  const Volume3D a = fixtures::random_volume({32, 32, 32}, 11);
  std::vector<float> shifted(a.data());
  for (float& x : shifted) x = 0.9f * x + 0.05f;
  const Volume3D b(a.dims(), a.spacing(), std::move(shifted));
  const double plain = ms_ssim(a, b, cfg);
  const double scaled = ms_ssim(a, b, renorm);
  // Renormalized exponents sum to 1 > 0.6305, so the score drops further
  // from 1 for an imperfect pair.
  CHECK(scaled < plain);
  CHECK(ms_ssim(a, a, renorm) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("ms_ssim stays in (0,1] for correlated non-negative volumes") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    MsSsimConfig cfg;
    cfg.window = 7;
    const Volume3D a = fixtures::random_volume({32, 32, 32}, seed + 100);
    std::vector<float> mixed(a.data());
    for (std::size_t i = 0; i < mixed.size(); ++i)
      mixed[i] = 0.5f * mixed[i] + static_cast<float>(0.5 * hash_uniform(seed + 200, i));
    const Volume3D b(a.dims(), a.spacing(), std::move(mixed));
    const double v = ms_ssim(a, b, cfg);
    CHECK(v > 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("ms_ssim names the failing axis and scale when the volume is too small") {
  const Volume3D a = fixtures::random_volume({32, 32, 32}, 12);
  try {
    ms_ssim(a, a);  // default 11-window: scale 3 is 8^3 < 11
    FAIL("expected VolumeTooSmall");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::volume_too_small);
    CHECK(std::string(e.what()).find("scale 3") != std::string::npos);
    CHECK(std::string(e.what()).find("axis x") != std::string::npos);
  }
}

// ---------------------------------------------------------------- features

TEST_CASE("pyramid features of a constant volume") {
  const Volume3D v({16, 16, 8}, {1, 1, 1}, std::vector<float>(2048, 0.5f));
  const auto f = extract_features(v);
  REQUIRE(static_cast<std::int64_t>(f.size()) == kPyramidFeatureDim);
  for (std::size_t i = 0; i < 292; ++i) CHECK(f[i] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(f[292] == doctest::Approx(0.5).epsilon(1e-12));  // mean
  CHECK(f[293] == 0.0);                                   // std, exact from the two-pass form
  CHECK(f[294] == 0.5);                                   // min
  CHECK(f[295] == 0.5);                                   // max
}

TEST_CASE("pyramid features separate a left/right split") {
  std::vector<float> data(16 * 16 * 8);
  const Dims dims{16, 16, 8};
  for (int z = 0; z < 8; ++z)
    for (int y = 0; y < 16; ++y)
      for (int x = 0; x < 16; ++x)
        data[static_cast<std::size_t>(x + 16 * (y + 16 * z))] = x < 8 ? 0.0f : 1.0f;
  const auto f = extract_features(Volume3D(dims, {1, 1, 1}, std::move(data)));
  // 8x8x4 grid: bx < 4 lies fully in the zero half.
  for (int bz = 0; bz < 4; ++bz)
    for (int by = 0; by < 8; ++by)
      for (int bx = 0; bx < 8; ++bx) {
        const double expect = bx < 4 ? 0.0 : 1.0;
        CHECK(f[static_cast<std::size_t>(bx + 8 * (by + 8 * bz))] == expect);
      }
}

TEST_CASE("identical volumes give identical descriptors") {
  const Volume3D v = fixtures::random_volume({17, 13, 9}, 21);
  CHECK(extract_features(v) == extract_features(v));
}

// ---------------------------------------------------------------- moments

TEST_CASE("moments two-point example") {
  const FeatureSet fs = FeatureSet::from_rows(2, 2, {0, 0, 2, 0});
  const FeatureMoments m = moments(fs);
  CHECK(m.mu[0] == doctest::Approx(1.0));
  CHECK(m.mu[1] == doctest::Approx(0.0));
  CHECK(m.sigma[0] == doctest::Approx(2.0));
  CHECK(m.sigma[1] == doctest::Approx(0.0));
  CHECK(m.sigma[3] == doctest::Approx(0.0));
}

TEST_CASE("moments of identical rows vanish") {
  std::vector<double> rows;
  for (int i = 0; i < 4; ++i) rows.insert(rows.end(), {1.5, -2.0, 0.25});
  const FeatureMoments m = moments(FeatureSet::from_rows(4, 3, std::move(rows)));
  for (double s : m.sigma) CHECK(s == doctest::Approx(0.0));
}

TEST_CASE("moments match the textbook two-pass oracle") {
  const FeatureSet fs = random_features(50, 5, 33);
  const FeatureMoments m = moments(fs);
  std::vector<double> mu, sigma;
  oracle::covariance_twopass(fs.rows, fs.n, fs.d, mu, sigma);
  for (std::int64_t j = 0; j < fs.d; ++j)
    CHECK(m.mu[static_cast<std::size_t>(j)] == doctest::Approx(mu[static_cast<std::size_t>(j)]).epsilon(1e-12));
  for (std::size_t i = 0; i < sigma.size(); ++i)
    CHECK(m.sigma[i] == doctest::Approx(sigma[i]).epsilon(1e-10));
}

TEST_CASE("moments require two samples") {
  try {
    moments(FeatureSet::from_rows(1, 3, {1, 2, 3}));
    FAIL("expected TooFewSamples");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::too_few_samples);
  }
}

// ---------------------------------------------------------------- FID

TEST_CASE("fid closed forms") {
  SUBCASE("identical moments give zero") {
    const auto sigma = random_psd(5, 1);
    SplitMix64 rng(2);
    std::vector<double> mu(5);
    for (auto& v : mu) v = rng.next_double();
    const auto m = make_moments(mu, sigma, 5);
    CHECK(std::abs(fid(m, m)) < 1e-8);
  }
  SUBCASE("equal identity covariances reduce to the mean term") {
    std::vector<double> eye(4, 0.0);
    eye[0] = eye[3] = 1.0;
    const auto r = make_moments({0.0, 0.0}, eye, 2);
    const auto g = make_moments({1.0, 0.0}, eye, 2);
    CHECK(fid(r, g) == doctest::Approx(1.0).epsilon(1e-8));
  }
  SUBCASE("scalar case 4 + 1 - 2*sqrt(4)") {
    const auto r = make_moments({0.0}, {4.0}, 1);
    const auto g = make_moments({0.0}, {1.0}, 1);
    CHECK(std::abs(fid(r, g) - 1.0) < 1e-10);
  }
}

TEST_CASE("fid agrees with the jacobi eigendecomposition oracle") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const std::int64_t d = 6;
    const auto sr = random_psd(d, seed * 2 + 1);
    const auto sg = random_psd(d, seed * 2 + 2);
    SplitMix64 rng(seed + 900);
    std::vector<double> mu_r(static_cast<std::size_t>(d)), mu_g(static_cast<std::size_t>(d));
    for (auto& v : mu_r) v = rng.next_double();
    for (auto& v : mu_g) v = rng.next_double();
    const double got = fid(make_moments(mu_r, sr, d), make_moments(mu_g, sg, d));
    const double want = oracle::fid_direct(mu_r, sr, mu_g, sg, d);
    CHECK(got == doctest::Approx(want).epsilon(1e-6));
  }
}

TEST_CASE("fid is symmetric") {
  const std::int64_t d = 4;
  const auto r = make_moments({0.1, 0.2, 0.3, 0.4}, random_psd(d, 5), d);
  const auto g = make_moments({-0.3, 0.0, 0.5, 1.0}, random_psd(d, 6), d);
  CHECK(std::abs(fid(r, g) - fid(g, r)) < 1e-8);
}

TEST_CASE("fid rejects mismatched dims and non-PSD inputs") {
  const auto r = make_moments({0.0}, {1.0}, 1);
  const auto g = make_moments({0.0, 0.0}, {1.0, 0.0, 0.0, 1.0}, 2);
  try {
    fid(r, g);
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::dimension_mismatch);
  }
  const auto bad = make_moments({0.0, 0.0}, {1.0, 0.0, 0.0, -1.0}, 2);
  try {
    fid(bad, bad);
    FAIL("expected NonFiniteEigenvalue");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::nonfinite_eigenvalue);
  }
}

TEST_CASE("fid regularization flag shifts near-singular covariances") {
  std::vector<double> singular(4, 0.0);
  singular[0] = 1.0;  // rank-1
  const auto r = make_moments({0.0, 0.0}, singular, 2);
  FidOptions opts;
  opts.regularize = true;
  CHECK(fid(r, r, opts) == doctest::Approx(0.0).epsilon(1e-8));
}

// ---------------------------------------------------------------- MMD

TEST_CASE("mmd2 negative-value fixture is exactly -1") {
  const FeatureSet x = FeatureSet::from_rows(2, 2, {1, 0, 0, 1});
  CHECK(mmd2(x, x, MmdKernel::dot) == -1.0);
}

TEST_CASE("mmd2 equals the brute-force double loop") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SplitMix64 rng(seed);
    const std::int64_t n = 2 + static_cast<std::int64_t>(rng.next_below(15));
    const std::int64_t m = 2 + static_cast<std::int64_t>(rng.next_below(15));
    const std::int64_t d = 1 + static_cast<std::int64_t>(rng.next_below(8));
    const FeatureSet x = random_features(n, d, seed * 3 + 1);
    const FeatureSet y = random_features(m, d, seed * 3 + 2);
    CHECK(std::abs(mmd2(x, y, MmdKernel::dot) - oracle::mmd2_direct(x.rows, n, y.rows, m, d, false, 0.0)) <=
          1e-12);
    CHECK(std::abs(mmd2(x, y, MmdKernel::rbf, 0.5) -
                   oracle::mmd2_direct(x.rows, n, y.rows, m, d, true, 0.5)) <= 1e-12);
  }
}

TEST_CASE("mmd2 is symmetric in its arguments") {
  const FeatureSet x = random_features(7, 4, 1);
  const FeatureSet y = random_features(9, 4, 2);
  CHECK(mmd2(x, y) == doctest::Approx(mmd2(y, x)).epsilon(1e-12));
  CHECK(mmd2(x, y, MmdKernel::rbf, 1.3) == doctest::Approx(mmd2(y, x, MmdKernel::rbf, 1.3)).epsilon(1e-12));
}

TEST_CASE("mmd2 on same-distribution samples stays near zero") {
  // Threshold frozen from an oracle run at this seed.
  const FeatureSet x = random_features(200, 4, 11);
  const FeatureSet y = random_features(200, 4, 12);
  CHECK(std::abs(mmd2(x, y, MmdKernel::rbf, 1.0)) < 0.01);
}

TEST_CASE("mmd2 validates sizes") {
  const FeatureSet x = random_features(2, 3, 1);
  const FeatureSet y = random_features(2, 4, 2);
  try {
    mmd2(x, y);
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::dimension_mismatch);
  }
  const FeatureSet one = FeatureSet::from_rows(1, 3, {1, 2, 3});
  try {
    mmd2(one, x);
    FAIL("expected TooFewSamples");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::too_few_samples);
  }
}

// ---------------------------------------------------------------- FEAT io

TEST_CASE("feature files round trip") {
  const FeatureSet fs = random_features(5, 7, 55);
  const auto path = temp_dir() / "f.feat";
  save_features(fs, path);
  const FeatureSet back = load_features(path);
  CHECK(back.n == fs.n);
  CHECK(back.d == fs.d);
  for (std::size_t i = 0; i < fs.rows.size(); ++i)
    CHECK(back.rows[i] == doctest::Approx(fs.rows[i]).epsilon(1e-6));
}

TEST_CASE("feature loader rejects malformed binaries") {
  SUBCASE("zero rows") {
    std::string bytes(14, '\0');
    std::memcpy(bytes.data(), "FEAT", 4);
    const std::uint16_t ver = 1;
    std::memcpy(bytes.data() + 4, &ver, 2);
    const std::uint32_t n = 0, d = 3;
    std::memcpy(bytes.data() + 6, &n, 4);
    std::memcpy(bytes.data() + 10, &d, 4);
    const auto p = temp_dir() / "zero.feat";
    std::ofstream(p, std::ios::binary).write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    try {
      load_features(p);
      FAIL("expected MalformedFeatureFile");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::malformed_feature_file);
    }
  }
  SUBCASE("truncated payload names expected and actual byte counts") {
    const FeatureSet fs = random_features(3, 3, 5);
    const auto p = temp_dir() / "trunc.feat";
    save_features(fs, p);
    std::ifstream in(p, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    bytes.resize(bytes.size() - 3);
    const auto p2 = temp_dir() / "trunc2.feat";
    std::ofstream(p2, std::ios::binary).write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    try {
      load_features(p2);
      FAIL("expected MalformedFeatureFile");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::malformed_feature_file);
      CHECK(std::string(e.what()).find("expected 50") != std::string::npos);
      CHECK(std::string(e.what()).find("47") != std::string::npos);
    }
  }
}

TEST_CASE("csv feature import") {
  const auto p = temp_dir() / "f.csv";
  std::ofstream(p) << "1.0,2.0,3.0\n4.0,5.0,6.0\n";
  const FeatureSet fs = load_features(p);
  CHECK(fs.n == 2);
  CHECK(fs.d == 3);
  CHECK(fs.rows == std::vector<double>{1, 2, 3, 4, 5, 6});

  std::ofstream(temp_dir() / "ragged.csv") << "1.0,2.0\n3.0\n";
  CHECK_THROWS_AS(load_features(temp_dir() / "ragged.csv"), Error);
}
