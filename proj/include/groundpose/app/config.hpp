#pragma once

// Run configuration: one JSON object whose keys are exactly the field names
// below. Missing keys keep their defaults.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "groundpose/pipeline.hpp"

namespace groundpose::app {

struct RunConfig {
  double fx = 600.0;
  double fy = 600.0;
  double cx = 400.0;
  double cy = 300.0;
  double height_mm = 700.0;
  int grid_rows = 9;
  int grid_cols = 11;
  double grid_margin_px = 64.0;
  int patch_size_image = 128;
  int patch_size_ipm = 256;
  double ipm_scale_mm = 2.0;
  int refinements = 2;
  int subsets = 50;
  double ratio = 0.6;
  std::uint64_t seed = 0;
  double initial_pitch_deg = 60.0;
  double magnitude_outlier_factor = 3.0;
  double magnitude_outlier_floor_px = 2.0;
  double min_confidence = 0.1;
  double prediction_outlier_factor = 3.0;
  double prediction_outlier_floor_px = 1.5;
  std::string input;
  std::string mask;
  std::string output = "out";
  int frame_stride = 1;

  bool operator==(const RunConfig&) const = default;
};

/// Throws ConfigError naming the offending key (and `source`).
RunConfig parse_config(const std::string& json_text, const std::string& source = "config");
RunConfig load_config(const std::filesystem::path& path);
std::string to_json_text(const RunConfig& config);

/// Applies "key=value" with the same key names and validation as the file.
void apply_override(RunConfig& config, const std::string& assignment);

/// Range checks; throws ConfigError naming the field.
void validate(const RunConfig& config);

CameraIntrinsics intrinsics(const RunConfig& config, int width, int height);
EstimatorConfig estimator_config(const RunConfig& config, std::optional<Mask> mask = std::nullopt);

}  // namespace groundpose::app
