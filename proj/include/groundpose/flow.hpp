#pragma once

// Patch-wise displacement fields and the coarse motion prior that lets
// fixed-size patches follow displacements larger than the patch itself.

#include <optional>
#include <span>
#include <vector>

#include "groundpose/estimator.hpp"
#include "groundpose/exec.hpp"
#include "groundpose/patch_grid.hpp"
#include "groundpose/registration.hpp"

namespace groundpose {

struct FlowOptions {
  int patch_size = 128;        ///< maximum patch size, shrunk at plane borders
  double min_coverage = 0.98;  ///< minimum fraction of valid pixels per window
  PocOptions poc;
  Exec exec = Exec::Parallel;
};

/// Registers one patch pair per anchor. The reference window is centered on
/// the anchor in `ref`; the current window on anchor + round(offset) in `cur`.
/// The returned displacement is the rounded offset plus the POC residual.
/// `offsets` may be empty (no offset). Masks may be null (all valid).
/// Entries that cannot be registered are kept with valid = false.
std::vector<FieldEntry> register_patches(const ImageBuffer& ref, const Mask* ref_valid, const ImageBuffer& cur,
                                         const Mask* cur_valid, std::span<const ImagePoint> anchors,
                                         std::span<const ImagePoint> offsets, const FlowOptions& options);

struct MotionPrior {
  double pitch = 0.0;      ///< candidate pitch giving the sharpest correlation
  MotionParams motion;     ///< yaw is always 0
  double confidence = 0.0;
};

/// Global POC between coarse bird's-eye views of the two frames, one per
/// candidate pitch (zero roll). The best-scoring candidate wins.
MotionPrior coarse_motion_prior(const ImageBuffer& prev, const ImageBuffer& cur, const CameraIntrinsics& K,
                                double height, std::span<const double> pitch_candidates, int raster_size = 256);

}  // namespace groundpose
