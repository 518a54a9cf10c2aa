#include "synthlab/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "synthlab/parallel.hpp"
#include "synthlab/volume_io.hpp"

namespace synthlab {

FeatureSet FeatureSet::from_rows(std::int64_t n, std::int64_t d, std::vector<double> rows) {
  if (n < 1 || d < 1) throw Error(Errc::invalid_argument, "FeatureSet: n and d must be >= 1");
  if (static_cast<std::int64_t>(rows.size()) != n * d)
    throw Error(Errc::invalid_argument, "FeatureSet: row data length mismatch");
  for (double v : rows)
    if (!std::isfinite(v)) throw Error(Errc::invalid_argument, "FeatureSet: non-finite value");
  return FeatureSet{n, d, std::move(rows)};
}

namespace {

struct Grid {
  int gx, gy, gz;
};

constexpr Grid kGrids[3] = {{8, 8, 4}, {4, 4, 2}, {2, 2, 1}};

// Mean over the block [floor(a*n/g), floor((a+1)*n/g)) per axis.
double block_mean(const Volume3D& v, const Grid& g, int bx, int by, int bz) {
  const Dims d = v.dims();
  const int x0 = static_cast<int>(static_cast<std::int64_t>(bx) * d.nx / g.gx);
  const int x1 = static_cast<int>(static_cast<std::int64_t>(bx + 1) * d.nx / g.gx);
  const int y0 = static_cast<int>(static_cast<std::int64_t>(by) * d.ny / g.gy);
  const int y1 = static_cast<int>(static_cast<std::int64_t>(by + 1) * d.ny / g.gy);
  const int z0 = static_cast<int>(static_cast<std::int64_t>(bz) * d.nz / g.gz);
  const int z1 = static_cast<int>(static_cast<std::int64_t>(bz + 1) * d.nz / g.gz);
  double acc = 0.0;
  std::int64_t cnt = 0;
  for (int z = z0; z < z1; ++z)
    for (int y = y0; y < y1; ++y)
      for (int x = x0; x < x1; ++x) {
        acc += v.at(x, y, z);
        ++cnt;
      }
  return cnt > 0 ? acc / static_cast<double>(cnt) : 0.0;
}

}  // namespace

std::vector<double> extract_features(const Volume3D& v) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(kPyramidFeatureDim));

  for (const Grid& g : kGrids) {
    const int nb = g.gx * g.gy * g.gz;
    std::vector<double> means(static_cast<std::size_t>(nb));
    par::parallel_for(nb, [&](std::int64_t b) {
      const int bx = static_cast<int>(b % g.gx);
      const int by = static_cast<int>((b / g.gx) % g.gy);
      const int bz = static_cast<int>(b / (static_cast<std::int64_t>(g.gx) * g.gy));
      means[static_cast<std::size_t>(b)] = block_mean(v, g, bx, by, bz);
    });
    out.insert(out.end(), means.begin(), means.end());
  }

  const std::int64_t n = v.size();
  const double mean = par::blocked_sum(n, [&](std::int64_t i) {
                        return static_cast<double>(v.data()[static_cast<std::size_t>(i)]);
                      }) /
                      static_cast<double>(n);
  // Two-pass variance: exact zero on constant volumes.
  const double var = par::blocked_sum(n, [&](std::int64_t i) {
                       const double d = static_cast<double>(v.data()[static_cast<std::size_t>(i)]) - mean;
                       return d * d;
                     }) /
                     static_cast<double>(n);
  float lo = v.data()[0], hi = v.data()[0];
  for (float x : v.data()) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  out.push_back(mean);
  out.push_back(std::sqrt(std::max(0.0, var)));
  out.push_back(lo);
  out.push_back(hi);
  return out;
}

FeatureMoments moments(const FeatureSet& fs) {
  if (fs.n < 2) throw Error(Errc::too_few_samples, "moments: need at least 2 feature rows");
  const std::int64_t n = fs.n, d = fs.d;
  FeatureMoments m;
  m.d = d;
  m.n = n;
  m.mu.resize(static_cast<std::size_t>(d));
  par::parallel_for(d, [&](std::int64_t j) {
    double acc = 0.0;
    for (std::int64_t i = 0; i < n; ++i) acc += fs.rows[static_cast<std::size_t>(i * d + j)];
    m.mu[static_cast<std::size_t>(j)] = acc / static_cast<double>(n);
  });
  m.sigma.assign(static_cast<std::size_t>(d * d), 0.0);
  // Upper triangle, each entry a fixed-order sum over samples; mirrored, so
  // sigma is exactly symmetric by construction.
  par::parallel_for(d, [&](std::int64_t j) {
    for (std::int64_t l = j; l < d; ++l) {
      double acc = 0.0;
      for (std::int64_t i = 0; i < n; ++i) {
        acc += (fs.rows[static_cast<std::size_t>(i * d + j)] - m.mu[static_cast<std::size_t>(j)]) *
               (fs.rows[static_cast<std::size_t>(i * d + l)] - m.mu[static_cast<std::size_t>(l)]);
      }
      const double c = acc / static_cast<double>(n - 1);
      m.sigma[static_cast<std::size_t>(j * d + l)] = c;
      m.sigma[static_cast<std::size_t>(l * d + j)] = c;
    }
  });
  return m;
}

namespace {

FeatureSet parse_feat_binary(const std::string& bytes, const std::filesystem::path& path) {
  if (bytes.size() < 14)
    throw Error(Errc::malformed_feature_file, path.string() + ": header needs 14 bytes, file has " +
                                                  std::to_string(bytes.size()));
  std::uint16_t version;
  std::uint32_t n, d;
  std::memcpy(&version, bytes.data() + 4, 2);
  std::memcpy(&n, bytes.data() + 6, 4);
  std::memcpy(&d, bytes.data() + 10, 4);
  if (version != 1)
    throw Error(Errc::malformed_feature_file, path.string() + ": unsupported version " + std::to_string(version));
  if (n == 0 || d == 0)
    throw Error(Errc::malformed_feature_file,
                path.string() + ": n=" + std::to_string(n) + ", d=" + std::to_string(d) + " must be positive");
  const std::size_t need = 14 + static_cast<std::size_t>(n) * d * 4;
  if (bytes.size() != need)
    throw Error(Errc::malformed_feature_file, path.string() + ": expected " + std::to_string(need) +
                                                  " bytes, got " + std::to_string(bytes.size()));
  std::vector<double> rows(static_cast<std::size_t>(n) * d);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    float f;
    std::memcpy(&f, bytes.data() + 14 + 4 * i, 4);
    if (!std::isfinite(f))
      throw Error(Errc::malformed_feature_file, path.string() + ": non-finite value at row " +
                                                    std::to_string(i / d) + ", column " + std::to_string(i % d));
    rows[i] = static_cast<double>(f);
  }
  return FeatureSet{static_cast<std::int64_t>(n), static_cast<std::int64_t>(d), std::move(rows)};
}

FeatureSet parse_feat_csv(const std::string& bytes, const std::filesystem::path& path) {
  std::vector<double> rows;
  std::int64_t n = 0, d = -1;
  std::istringstream lines(bytes);
  std::string line;
  while (std::getline(lines, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::int64_t cols = 0;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      try {
        std::size_t consumed = 0;
        const double v = std::stod(cell, &consumed);
        if (consumed != cell.size() || !std::isfinite(v)) throw std::invalid_argument(cell);
        rows.push_back(v);
      } catch (const std::exception&) {
        throw Error(Errc::malformed_feature_file,
                    path.string() + ": cannot parse \"" + cell + "\" on line " + std::to_string(n + 1));
      }
      ++cols;
    }
    if (d < 0) d = cols;
    if (cols != d)
      throw Error(Errc::malformed_feature_file, path.string() + ": line " + std::to_string(n + 1) + " has " +
                                                    std::to_string(cols) + " columns, expected " + std::to_string(d));
    ++n;
  }
  if (n == 0 || d <= 0) throw Error(Errc::malformed_feature_file, path.string() + ": no feature rows");
  return FeatureSet{n, d, std::move(rows)};
}

}  // namespace

FeatureSet load_features(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_failure, "cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), "FEAT", 4) == 0) return parse_feat_binary(bytes, path);
  return parse_feat_csv(bytes, path);
}

void save_features(const FeatureSet& fs, const std::filesystem::path& path) {
  std::string bytes(14 + static_cast<std::size_t>(fs.n) * fs.d * 4, '\0');
  std::memcpy(bytes.data(), "FEAT", 4);
  const std::uint16_t version = 1;
  const auto n = static_cast<std::uint32_t>(fs.n);
  const auto d = static_cast<std::uint32_t>(fs.d);
  std::memcpy(bytes.data() + 4, &version, 2);
  std::memcpy(bytes.data() + 6, &n, 4);
  std::memcpy(bytes.data() + 10, &d, 4);
  for (std::size_t i = 0; i < static_cast<std::size_t>(fs.n) * fs.d; ++i) {
    const float f = static_cast<float>(fs.rows[i]);
    std::memcpy(bytes.data() + 14 + 4 * i, &f, 4);
  }
  atomic_write_bytes(path, bytes);
}

}  // namespace synthlab
