#pragma once

// Geometric bundle adjustment over the seven pose/motion parameters.
//
// Image plane:   r = m_c - m_p - d,
//   m_c = project(motion_transform(backproject(m_p; pose_p); motion); pose_c)
// Virtual IPM:   r = M_c - M_p - d_hat, where the anchor M_p on the previous
//   frame's raster maps to the image with the pose that built that raster,
//   to the ground with the candidate previous pose, through the motion, into
//   the current image with the candidate current pose and finally onto the
//   current raster with the pose that built it.

#include <array>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "groundpose/exec.hpp"
#include "groundpose/ipm.hpp"
#include "groundpose/registration.hpp"

namespace groundpose {

/// Free parameters: previous and current pose (pitch, roll) plus planar
/// motion. Height is supplied separately and held fixed.
struct ParamVector {
  static constexpr int kSize = 7;

  double pitch_prev = std::numbers::pi / 3;
  double roll_prev = 0.0;
  double pitch_cur = std::numbers::pi / 3;
  double roll_cur = 0.0;
  double tx = 0.0;
  double tz = 0.0;
  double yaw = 0.0;

  std::array<double, kSize> to_array() const { return {pitch_prev, roll_prev, pitch_cur, roll_cur, tx, tz, yaw}; }
  static ParamVector from_array(const std::array<double, kSize>& a) {
    return {a[0], a[1], a[2], a[3], a[4], a[5], a[6]};
  }
  PoseParams prev_pose(double height) const { return {pitch_prev, roll_prev, height}; }
  PoseParams cur_pose(double height) const { return {pitch_cur, roll_cur, height}; }
  MotionParams motion() const { return {tx, tz, yaw}; }

  /// Both poses at `pitch` with zero roll and no motion.
  static ParamVector initial(double pitch = std::numbers::pi / 3) { return {pitch, 0.0, pitch, 0.0, 0.0, 0.0, 0.0}; }

  bool operator==(const ParamVector&) const = default;
};

enum class Plane { Image, Ipm };

struct FieldEntry {
  ImagePoint anchor;  ///< patch center on the field's plane (integer pixel)
  Displacement d;
  int patch_size = 0;
  bool valid = true;   ///< registration produced a usable displacement
  bool inlier = true;  ///< survived outlier rejection
  std::optional<ImagePoint> predicted;  ///< displacement predicted by the previous estimate
};

struct IpmPair {
  IpmPlaneSpec prev;
  IpmPlaneSpec cur;
};

struct DisplacementField {
  Plane plane = Plane::Image;
  std::vector<FieldEntry> entries;
  std::optional<IpmPair> ipm;  ///< set when plane == Plane::Ipm

  std::size_t active_count() const;  ///< valid && inlier
};

// ---------------------------------------------------------------------------
// Residual chains (templated so the solver can differentiate them).

template <typename T>
using Residual = std::array<T, 2>;

/// Predicted current-frame position of an image-plane anchor.
template <typename T>
std::optional<BasicImagePoint<T>> image_chain(const ImagePoint& anchor, const std::array<T, 7>& p, double height,
                                              const CameraIntrinsics& K) {
  const BasicPose<T> prev{p[0], p[1], T(height)};
  const BasicPose<T> cur{p[2], p[3], T(height)};
  const BasicMotion<T> motion{p[4], p[5], p[6]};
  const BasicImagePoint<T> m{T(anchor.u), T(anchor.v)};
  const auto g_prev = try_backproject(m, prev, K);
  if (!g_prev) return std::nullopt;
  return try_project(motion_transform(*g_prev, motion), cur, K);
}

/// Predicted current-raster position of a previous-raster anchor.
template <typename T>
std::optional<BasicImagePoint<T>> ipm_chain(const ImagePoint& anchor, const std::array<T, 7>& p, double height,
                                            const IpmPair& planes, const CameraIntrinsics& K) {
  const auto m_prev = try_project(raster_to_ground(planes.prev, anchor), planes.prev.pose_used, K);
  if (!m_prev) return std::nullopt;
  const auto m_cur = image_chain(*m_prev, p, height, K);
  if (!m_cur) return std::nullopt;
  const auto g_cur = try_backproject(*m_cur, planes.cur.pose_used, K);
  if (!g_cur) return std::nullopt;
  return ground_to_raster(planes.cur, *g_cur);
}

template <typename T>
std::optional<Residual<T>> field_residual(const DisplacementField& field, const FieldEntry& e,
                                          const std::array<T, 7>& p, double height, const CameraIntrinsics& K) {
  const auto moved = field.plane == Plane::Image ? image_chain(e.anchor, p, height, K)
                                                 : ipm_chain(e.anchor, p, height, *field.ipm, K);
  if (!moved) return std::nullopt;
  return Residual<T>{moved->u - e.anchor.u - e.d.dx, moved->v - e.anchor.v - e.d.dy};
}

/// (m_c - m_p - d) in image pixels; nullopt when the chain leaves the ground.
std::optional<Residual<double>> residual_image(const FieldEntry& entry, const ParamVector& params, double height,
                                               const CameraIntrinsics& K);

/// (M_c - M_p - d_hat) in IPM raster pixels.
std::optional<Residual<double>> residual_ipm(const FieldEntry& entry, const ParamVector& params, double height,
                                             const IpmPair& planes, const CameraIntrinsics& K);

/// Displacement the parameters induce at an anchor of the field's plane.
std::optional<ImagePoint> predicted_displacement(const DisplacementField& field, const ImagePoint& anchor,
                                                 const ParamVector& params, double height,
                                                 const CameraIntrinsics& K);

/// Residual rows and their 2 x 7 Jacobian w.r.t. the natural parameters.
struct LinearizedResidual {
  Residual<double> r;
  std::array<std::array<double, 7>, 2> J;
};
std::optional<LinearizedResidual> linearize(const DisplacementField& field, const FieldEntry& entry,
                                            const ParamVector& params, double height, const CameraIntrinsics& K);

/// Sum of squared residuals over the given entries (all active ones when
/// `indices` is empty). nullopt when any selected entry leaves the ground.
std::optional<double> field_cost(const DisplacementField& field, const ParamVector& params, double height,
                                 const CameraIntrinsics& K, std::span<const std::size_t> indices = {});

std::vector<std::size_t> active_indices(const DisplacementField& field);

// ---------------------------------------------------------------------------
// Levenberg-Marquardt.

struct LmOptions {
  double initial_damping = 1e-3;
  double damping_up = 10.0;
  double damping_down = 10.0;
  int max_iterations = 100;
  double min_relative_decrease = 1e-10;
  double min_step_norm = 1e-10;
};

enum class LmStatus { Converged, NonConvergence };

struct LmResult {
  ParamVector params;
  double cost = 0.0;        ///< sum of squared residuals at `params`
  double initial_cost = 0.0;
  int iterations = 0;
  LmStatus status = LmStatus::Converged;
  std::vector<double> accepted_costs;  ///< cost after every accepted step, in order
};

/// Minimizes the residual sum over `indices` (all active entries when empty).
/// Lengths are scaled by `height` and angles kept in radians inside the
/// solver. Throws InsufficientInliers below four entries.
LmResult solve_lm(const DisplacementField& field, const ParamVector& init, double height, const CameraIntrinsics& K,
                  const LmOptions& options = {}, std::span<const std::size_t> indices = {});

// ---------------------------------------------------------------------------
// Robust random-subset estimation.

struct RobustOptions {
  int subsets = 50;
  double ratio = 0.6;
  std::uint64_t seed = 0;
  double magnitude_factor = 3.0;    ///< reject |d| > max(factor * median |d|, floor)
  double magnitude_floor_px = 2.0;
  double min_confidence = 0.1;
  LmOptions lm;
  Exec exec = Exec::Parallel;
};

struct StageResult {
  std::string name;
  ParamVector params;
  double cost = 0.0;  ///< over all inliers
  double rms = 0.0;   ///< per-component residual RMS, plane-native pixels
  std::size_t inliers = 0;
  int iterations = 0;
  bool converged = true;
  bool degraded = false;
  std::vector<double> candidate_costs;  ///< all-inlier cost of every subset solution
  DisplacementField field;              ///< with the final inlier flags
};

/// Marks entries with implausible magnitude or low confidence as outliers.
void reject_by_magnitude(DisplacementField& field, double factor, double floor_px, double min_confidence);

/// Marks entries whose displacement deviates from the prediction by more than
/// max(factor * median deviation, floor_px). Entries without prediction are rejected.
void reject_by_prediction(DisplacementField& field, double factor, double floor_px);

/// Magnitude-based rejection, then `subsets` LM solves on random subsets of
/// ratio * inliers entries; the solution with the smallest cost over all
/// inliers wins (lowest subset index on ties). Deterministic given the seed,
/// independent of `exec`.
StageResult robust_estimate(DisplacementField field, const ParamVector& init, double height,
                            const CameraIntrinsics& K, const RobustOptions& options = {});

}  // namespace groundpose
