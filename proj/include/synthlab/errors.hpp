#pragma once

#include <stdexcept>
#include <string>

namespace synthlab {

// Error conditions surfaced by the library. CLI maps these to exit code 3
// (data/validation); anything else escaping to main is an internal failure.
enum class Errc {
  io_failure,
  malformed_header,
  unsupported_dtype,
  truncated_payload,
  constant_volume,
  dims_mismatch,
  overlapping_masks,
  degenerate_clusters,
  too_few_distinct_values,
  single_cluster,
  coincident_centroids,
  zero_mse,
  volume_too_small,
  too_few_samples,
  dimension_mismatch,
  nonfinite_eigenvalue,
  malformed_feature_file,
  malformed_tensor_file,
  shape_mismatch,
  step_out_of_range,
  label_out_of_range,
  absent_class,
  boundary_point,
  invalid_range,
  unnormalized_input,
  all_zero_differences,
  invalid_argument,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace synthlab
