#include "synthlab/volume_io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include <json.hpp>

namespace synthlab {

namespace {

using json = nlohmann::json;

constexpr int kHeaderSize = 348;
constexpr std::int16_t kDtUint8 = 2;
constexpr std::int16_t kDtInt16 = 4;
constexpr std::int16_t kDtFloat32 = 16;

template <class T>
T rd(const std::string& buf, std::size_t off) {
  T v;
  std::memcpy(&v, buf.data() + off, sizeof(T));
  return v;
}

template <class T>
void wr(std::string& buf, std::size_t off, T v) {
  std::memcpy(buf.data() + off, &v, sizeof(T));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_failure, "cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (!in.good() && !in.eof()) throw Error(Errc::io_failure, "read failed for " + path.string());
  return bytes;
}

struct RawHeader {
  Dims dims;
  Spacing spacing;
  std::string dtype;      // "u8" | "i16" | "f32"
  std::size_t vox_offset; // byte offset of the payload within the file
};

RawHeader parse_nifti_header(const std::string& bytes, const std::filesystem::path& path) {
  if (bytes.size() < kHeaderSize)
    throw Error(Errc::malformed_header,
                path.string() + ": file is " + std::to_string(bytes.size()) + " bytes, header needs 348 (offset 0)");
  const auto sizeof_hdr = rd<std::int32_t>(bytes, 0);
  if (sizeof_hdr != kHeaderSize) {
    if (__builtin_bswap32(static_cast<std::uint32_t>(sizeof_hdr)) == kHeaderSize)
      throw Error(Errc::malformed_header, path.string() + ": big-endian NIfTI is not supported (offset 0)");
    throw Error(Errc::malformed_header,
                path.string() + ": sizeof_hdr = " + std::to_string(sizeof_hdr) + ", expected 348 (offset 0)");
  }
  if (std::memcmp(bytes.data() + 344, "n+1\0", 4) != 0)
    throw Error(Errc::malformed_header, path.string() + ": bad magic, expected \"n+1\" (offset 344)");
  const auto ndim = rd<std::int16_t>(bytes, 40);
  if (ndim != 3)
    throw Error(Errc::malformed_header,
                path.string() + ": dim[0] = " + std::to_string(ndim) + ", only 3-D volumes are supported (offset 40)");
  RawHeader h;
  h.dims.nx = rd<std::int16_t>(bytes, 42);
  h.dims.ny = rd<std::int16_t>(bytes, 44);
  h.dims.nz = rd<std::int16_t>(bytes, 46);
  if (h.dims.nx <= 0 || h.dims.ny <= 0 || h.dims.nz <= 0)
    throw Error(Errc::malformed_header, path.string() + ": non-positive dim (offset 42)");
  const auto datatype = rd<std::int16_t>(bytes, 70);
  const auto bitpix = rd<std::int16_t>(bytes, 72);
  int expected_bitpix = 0;
  switch (datatype) {
    case kDtUint8: h.dtype = "u8"; expected_bitpix = 8; break;
    case kDtInt16: h.dtype = "i16"; expected_bitpix = 16; break;
    case kDtFloat32: h.dtype = "f32"; expected_bitpix = 32; break;
    default:
      throw Error(Errc::unsupported_dtype,
                  path.string() + ": datatype code " + std::to_string(datatype) +
                      ", supported: uint8(2), int16(4), float32(16) (offset 70)");
  }
  if (bitpix != expected_bitpix)
    throw Error(Errc::malformed_header,
                path.string() + ": bitpix " + std::to_string(bitpix) + " does not match datatype (offset 72)");
  for (int a = 0; a < 3; ++a) {
    const float p = rd<float>(bytes, 76 + 4 * (a + 1));
    if (!(p > 0.0f) || !std::isfinite(p))
      throw Error(Errc::malformed_header,
                  path.string() + ": pixdim[" + std::to_string(a + 1) + "] must be positive (offset " +
                      std::to_string(76 + 4 * (a + 1)) + ")");
    h.spacing[static_cast<std::size_t>(a)] = static_cast<double>(p);
  }
  const float vox_offset = rd<float>(bytes, 108);
  if (!(vox_offset >= kHeaderSize) || vox_offset != std::floor(vox_offset))
    throw Error(Errc::malformed_header, path.string() + ": vox_offset must be an integer >= 348 (offset 108)");
  h.vox_offset = static_cast<std::size_t>(vox_offset);
  return h;
}

std::size_t dtype_size(const std::string& dtype) {
  if (dtype == "u8") return 1;
  if (dtype == "i16") return 2;
  return 4;
}

// Decodes the payload to float without scaling.
std::vector<float> decode_payload(const std::string& bytes, const RawHeader& h, const std::filesystem::path& path) {
  const auto n = static_cast<std::size_t>(h.dims.count());
  const std::size_t need = n * dtype_size(h.dtype);
  if (bytes.size() < h.vox_offset + need)
    throw Error(Errc::truncated_payload,
                path.string() + ": expected " + std::to_string(need) + " payload bytes at offset " +
                    std::to_string(h.vox_offset) + ", got " +
                    std::to_string(bytes.size() > h.vox_offset ? bytes.size() - h.vox_offset : 0));
  std::vector<float> out(n);
  const char* p = bytes.data() + h.vox_offset;
  if (h.dtype == "u8") {
    for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<float>(static_cast<std::uint8_t>(p[i]));
  } else if (h.dtype == "i16") {
    for (std::size_t i = 0; i < n; ++i) {
      std::int16_t v;
      std::memcpy(&v, p + 2 * i, 2);
      out[i] = static_cast<float>(v);
    }
  } else {
    std::memcpy(out.data(), p, 4 * n);
  }
  return out;
}

std::string build_nifti(const Dims& dims, const Spacing& spacing, std::int16_t datatype, std::int16_t bitpix,
                        const char* payload, std::size_t payload_bytes) {
  // 348-byte header, 4 zero extension bytes, payload at 352.
  std::string buf(352 + payload_bytes, '\0');
  wr<std::int32_t>(buf, 0, kHeaderSize);
  wr<std::int16_t>(buf, 40, 3);
  wr<std::int16_t>(buf, 42, static_cast<std::int16_t>(dims.nx));
  wr<std::int16_t>(buf, 44, static_cast<std::int16_t>(dims.ny));
  wr<std::int16_t>(buf, 46, static_cast<std::int16_t>(dims.nz));
  for (std::size_t i = 48; i < 56; i += 2) wr<std::int16_t>(buf, i, 1);
  wr<std::int16_t>(buf, 70, datatype);
  wr<std::int16_t>(buf, 72, bitpix);
  wr<float>(buf, 76, 1.0f);
  wr<float>(buf, 80, static_cast<float>(spacing[0]));
  wr<float>(buf, 84, static_cast<float>(spacing[1]));
  wr<float>(buf, 88, static_cast<float>(spacing[2]));
  wr<float>(buf, 108, 352.0f);
  wr<float>(buf, 112, 1.0f);                       // scl_slope
  buf[123] = 2;                                    // xyzt_units: mm
  std::memcpy(buf.data() + 344, "n+1\0", 4);
  std::memcpy(buf.data() + 352, payload, payload_bytes);
  return buf;
}

RawHeader parse_sidecar(const std::filesystem::path& payload_path) {
  const auto sidecar = std::filesystem::path(payload_path.string() + ".json");
  json j;
  try {
    j = json::parse(read_file(sidecar));
  } catch (const json::parse_error& e) {
    throw Error(Errc::malformed_header, sidecar.string() + ": " + e.what());
  }
  for (const auto& [key, _] : j.items()) {
    if (key != "dims" && key != "spacing" && key != "dtype")
      throw Error(Errc::malformed_header, sidecar.string() + ": unknown key \"" + key + "\"");
  }
  if (!j.contains("dims") || !j.contains("spacing") || !j.contains("dtype"))
    throw Error(Errc::malformed_header, sidecar.string() + ": requires keys dims, spacing, dtype");
  RawHeader h;
  try {
    const auto dims = j["dims"].get<std::vector<int>>();
    const auto spacing = j["spacing"].get<std::vector<double>>();
    if (dims.size() != 3 || spacing.size() != 3)
      throw Error(Errc::malformed_header, sidecar.string() + ": dims and spacing must have 3 entries");
    h.dims = {dims[0], dims[1], dims[2]};
    h.spacing = {spacing[0], spacing[1], spacing[2]};
    h.dtype = j["dtype"].get<std::string>();
  } catch (const json::exception& e) {
    throw Error(Errc::malformed_header, sidecar.string() + ": " + e.what());
  }
  if (h.dtype != "u8" && h.dtype != "i16" && h.dtype != "f32")
    throw Error(Errc::unsupported_dtype, sidecar.string() + ": dtype \"" + h.dtype + "\"");
  if (h.dims.nx <= 0 || h.dims.ny <= 0 || h.dims.nz <= 0)
    throw Error(Errc::malformed_header, sidecar.string() + ": dims must be positive");
  if (!(h.spacing[0] > 0.0) || !(h.spacing[1] > 0.0) || !(h.spacing[2] > 0.0))
    throw Error(Errc::malformed_header, sidecar.string() + ": spacing must be positive");
  h.vox_offset = 0;
  return h;
}

std::pair<RawHeader, std::vector<float>> load_any(const std::filesystem::path& path, VolumeFormat format) {
  if (format == VolumeFormat::nifti) {
    const std::string bytes = read_file(path);
    RawHeader h = parse_nifti_header(bytes, path);
    auto data = decode_payload(bytes, h, path);
    return {std::move(h), std::move(data)};
  }
  RawHeader h = parse_sidecar(path);
  const std::string bytes = read_file(path);
  auto data = decode_payload(bytes, h, path);
  return {std::move(h), std::move(data)};
}

}  // namespace

VolumeFormat format_from_path(const std::filesystem::path& path) {
  return path.extension() == ".nii" ? VolumeFormat::nifti : VolumeFormat::raw_sidecar;
}

void atomic_write_bytes(const std::filesystem::path& path, const std::string& bytes) {
  auto dir = path.parent_path();
  if (dir.empty()) dir = ".";
  std::random_device rd_dev;
  const auto tmp = dir / (path.filename().string() + ".tmp" + std::to_string(rd_dev()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io_failure, "cannot create " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out.good()) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error(Errc::io_failure, "write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(Errc::io_failure, "rename to " + path.string() + " failed: " + ec.message());
  }
}

Volume3D load_volume(const std::filesystem::path& path, VolumeFormat format) {
  auto [h, data] = load_any(path, format);
  return Volume3D(h.dims, h.spacing, std::move(data));
}

void save_volume(const Volume3D& v, const std::filesystem::path& path, VolumeFormat format) {
  const auto n = static_cast<std::size_t>(v.size());
  if (format == VolumeFormat::nifti) {
    atomic_write_bytes(path, build_nifti(v.dims(), v.spacing(), kDtFloat32, 32,
                                         reinterpret_cast<const char*>(v.data().data()), 4 * n));
    return;
  }
  json sidecar = {
      {"dims", {v.dims().nx, v.dims().ny, v.dims().nz}},
      {"spacing", {v.spacing()[0], v.spacing()[1], v.spacing()[2]}},
      {"dtype", "f32"},
  };
  atomic_write_bytes(std::filesystem::path(path.string() + ".json"), sidecar.dump(2) + "\n");
  std::string payload(4 * n, '\0');
  std::memcpy(payload.data(), v.data().data(), 4 * n);
  atomic_write_bytes(path, payload);
}

LabelMap3D load_labelmap(const std::filesystem::path& path, VolumeFormat format) {
  auto [h, data] = load_any(path, format);
  std::vector<std::int32_t> labels(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const float f = data[i];
    if (f != std::floor(f) || f < 0.0f)
      throw Error(Errc::invalid_argument,
                  path.string() + ": label value " + std::to_string(f) + " at voxel " + std::to_string(i) +
                      " is not a non-negative integer");
    labels[i] = static_cast<std::int32_t>(f);
  }
  return LabelMap3D(h.dims, h.spacing, std::move(labels));
}

void save_labelmap(const LabelMap3D& m, const std::filesystem::path& path, VolumeFormat format) {
  const auto n = static_cast<std::size_t>(m.size());
  std::string payload(2 * n, '\0');
  for (std::size_t i = 0; i < n; ++i) {
    const std::int32_t v = m.labels()[i];
    if (v > 32767)
      throw Error(Errc::invalid_argument, "label " + std::to_string(v) + " does not fit int16");
    const auto s = static_cast<std::int16_t>(v);
    std::memcpy(payload.data() + 2 * i, &s, 2);
  }
  if (format == VolumeFormat::nifti) {
    atomic_write_bytes(path, build_nifti(m.dims(), m.spacing(), kDtInt16, 16, payload.data(), payload.size()));
    return;
  }
  json sidecar = {
      {"dims", {m.dims().nx, m.dims().ny, m.dims().nz}},
      {"spacing", {m.spacing()[0], m.spacing()[1], m.spacing()[2]}},
      {"dtype", "i16"},
  };
  atomic_write_bytes(std::filesystem::path(path.string() + ".json"), sidecar.dump(2) + "\n");
  atomic_write_bytes(path, payload);
}

}  // namespace synthlab
