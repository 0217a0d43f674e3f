#pragma once

// Full pair workflow: image-plane estimate, then virtual-IPM refinements.

#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "groundpose/flow.hpp"

namespace groundpose {

struct EstimatorConfig {
  double height_mm = 700.0;
  int grid_rows = 9;
  int grid_cols = 11;
  double grid_margin = 64.0;
  int patch_size_image = 128;
  int patch_size_ipm = 256;
  double ipm_scale_mm = 2.0;
  int refinements = 2;
  int image_passes = 2;  ///< register/estimate rounds on the image plane
  double initial_pitch = std::numbers::pi / 3;
  std::vector<double> prior_pitch_offsets = {-10.0 * std::numbers::pi / 180, -5.0 * std::numbers::pi / 180, 0.0,
                                             5.0 * std::numbers::pi / 180, 10.0 * std::numbers::pi / 180};
  double prediction_outlier_factor = 3.0;
  double prediction_outlier_floor_px = 1.5;
  RobustOptions robust;
  std::optional<Mask> mask;  ///< nonzero = ground; restricts interest points
  Exec exec = Exec::Parallel;
  /// Called with every registered field before estimation (tests use it to
  /// inject outliers). Stage names: "initial", "refine-1", ...
  std::function<void(const std::string& stage, DisplacementField& field)> field_hook;
};

struct EstimationResult {
  ParamVector params;
  double rms = 0.0;
  std::size_t inliers = 0;
  int iterations = 0;
  bool degraded = false;
  std::string failure;  ///< why the last stage was abandoned, when degraded
  MotionPrior prior;
  std::vector<StageResult> history;  ///< initial, refine-1, ...
};

/// Throws InsufficientInliers (or another Error) when the image-plane stage
/// fails; later failures keep the last good stage and set `degraded`.
EstimationResult estimate_pair(const ImageBuffer& prev, const ImageBuffer& cur, const CameraIntrinsics& K,
                               const EstimatorConfig& config);

/// Interest points used by estimate_pair.
std::vector<ImagePoint> interest_points(const CameraIntrinsics& K, const EstimatorConfig& config);

/// Virtual IPM planes built from the estimate for both frames.
IpmPair plan_ipm_pair(std::span<const ImagePoint> points, const ParamVector& estimate, const CameraIntrinsics& K,
                      const EstimatorConfig& config);

}  // namespace groundpose
