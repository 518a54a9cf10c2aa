#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "synthlab/volume.hpp"

namespace synthlab {

enum class VolumeFormat {
  nifti,        // single-file .nii, little-endian, uncompressed
  raw_sidecar,  // <path> = raw payload, <path>.json = {dims, spacing, dtype}
};

// Picks nifti for .nii paths, raw_sidecar otherwise.
VolumeFormat format_from_path(const std::filesystem::path& path);

// NIfTI subset: dtypes uint8/int16/float32, dim[0]=3, magic "n+1\0".
// Integer payloads are converted to float without scaling.
Volume3D load_volume(const std::filesystem::path& path, VolumeFormat format);
void save_volume(const Volume3D& v, const std::filesystem::path& path, VolumeFormat format);

// Label maps ride the same containers; uint8/int16 payloads, and float32
// payloads holding exact integers, are accepted on load. Saved as int16.
LabelMap3D load_labelmap(const std::filesystem::path& path, VolumeFormat format);
void save_labelmap(const LabelMap3D& m, const std::filesystem::path& path, VolumeFormat format);

// All writers go through this: write to a temp file in the target directory,
// then rename over the destination.
void atomic_write_bytes(const std::filesystem::path& path, const std::string& bytes);

}  // namespace synthlab
