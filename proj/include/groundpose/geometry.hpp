#pragma once

// Camera/ground coordinate conventions.
//
// Camera frame C: x right, y down, z along the optical axis.
// Ground frame G: origin at the foot of the perpendicular from the optical
// center, y down (ground plane is y = 0, camera sits at y = -h), z the
// projection of the optical axis onto the plane, x = y cross z.
//
// Camera-to-ground rotation R_GC = Rx(-pitch) * Rz(roll): pitch 0 looks at the
// horizon, pitch pi/2 is nadir, roll turns the image about the optical axis.
// Angles are radians, lengths millimeters, image coordinates pixels with pixel
// (i, j) centered at (u, v) = (i, j).

#include <cmath>
#include <optional>

#include "groundpose/errors.hpp"
#include "groundpose/jet.hpp"

namespace groundpose {

struct CameraIntrinsics {
  double fx = 600.0;
  double fy = 600.0;
  double cx = 400.0;
  double cy = 300.0;
  int width = 800;
  int height = 600;

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;
};

template <typename T>
struct BasicPose {
  T pitch{};   ///< downward tilt of the optical axis
  T roll{};    ///< rotation about the optical axis
  T height{};  ///< optical center above ground
};
using PoseParams = BasicPose<double>;

/// Planar rigid motion expressing previous-frame ground points in the current
/// frame's ground coordinates: rotate by `yaw` about the ground normal, then
/// translate by (-tx, -tz).
template <typename T>
struct BasicMotion {
  T tx{};
  T tz{};
  T yaw{};
};
using MotionParams = BasicMotion<double>;

template <typename T>
struct BasicGroundPoint {
  T x{};
  T z{};
};
using GroundPoint = BasicGroundPoint<double>;

template <typename T>
struct BasicImagePoint {
  T u{};
  T v{};
};
using ImagePoint = BasicImagePoint<double>;

void validate(const PoseParams& pose);

inline double travel_distance(const MotionParams& m) { return std::hypot(m.tx, m.tz); }

namespace detail {
// Relative tolerance below which a depth or ray elevation counts as zero.
inline constexpr double kGrazing = 1e-9;
}  // namespace detail

/// Perspective projection of a ground point; nullopt when the point lies on or
/// behind the camera plane.
template <typename T, typename P>
std::optional<BasicImagePoint<T>> try_project(const BasicGroundPoint<T>& g, const BasicPose<P>& pose,
                                              const CameraIntrinsics& K) {
  using std::cos;
  using std::sin;
  const P ct = cos(pose.pitch), st = sin(pose.pitch);
  const P cr = cos(pose.roll), sr = sin(pose.roll);
  // q = point relative to the optical center, in G.
  const T qx = g.x;
  const T qy = T(0.0) + pose.height;
  const T qz = g.z;
  // a = Rx(pitch) q
  const T ax = qx;
  const T ay = ct * qy - st * qz;
  const T az = st * qy + ct * qz;
  const double depth = value_of(az);
  const double scale = std::sqrt(value_of(qx) * value_of(qx) + value_of(qy) * value_of(qy) +
                                 value_of(qz) * value_of(qz));
  if (!(depth > detail::kGrazing * scale)) return std::nullopt;
  // p = Rz(-roll) a
  const T px = cr * ax + sr * ay;
  const T py = cr * ay - sr * ax;
  return BasicImagePoint<T>{K.fx * px / az + K.cx, K.fy * py / az + K.cy};
}

/// Ray/ground intersection of an image point; nullopt when the ray is
/// parallel to or diverges from the ground plane.
template <typename T, typename P>
std::optional<BasicGroundPoint<T>> try_backproject(const BasicImagePoint<T>& m, const BasicPose<P>& pose,
                                                   const CameraIntrinsics& K) {
  using std::cos;
  using std::sin;
  const P ct = cos(pose.pitch), st = sin(pose.pitch);
  const P cr = cos(pose.roll), sr = sin(pose.roll);
  const T rx = (m.u - K.cx) / K.fx;
  const T ry = (m.v - K.cy) / K.fy;
  // b = Rz(roll) r, r = (rx, ry, 1)
  const T bx = cr * rx - sr * ry;
  const T by = sr * rx + cr * ry;
  // d = Rx(-pitch) b
  const T dx = bx;
  const T dy = ct * by + st;
  const T dz = ct - st * by;
  const double norm = std::sqrt(value_of(dx) * value_of(dx) + value_of(dy) * value_of(dy) +
                                value_of(dz) * value_of(dz));
  if (!(value_of(dy) > detail::kGrazing * norm)) return std::nullopt;
  const T t = (T(0.0) + pose.height) / dy;
  return BasicGroundPoint<T>{t * dx, t * dz};
}

template <typename T, typename M>
BasicGroundPoint<T> motion_transform(const BasicGroundPoint<T>& p, const BasicMotion<M>& motion) {
  using std::cos;
  using std::sin;
  const M c = cos(motion.yaw), s = sin(motion.yaw);
  return {c * p.x + s * p.z - motion.tx, c * p.z - s * p.x - motion.tz};
}

/// Throwing forms of the mappings.
ImagePoint project(const GroundPoint& p, const PoseParams& pose, const CameraIntrinsics& K);
GroundPoint backproject(const ImagePoint& m, const PoseParams& pose, const CameraIntrinsics& K);
GroundPoint motion_transform(const GroundPoint& p, const MotionParams& motion);

/// Motion undoing `m`: motion_transform(motion_transform(p, m), inverse(m)) == p.
MotionParams inverse(const MotionParams& m);

/// Motion equivalent to applying `first` and then `second`.
MotionParams compose(const MotionParams& first, const MotionParams& second);

/// Image row where a ray through column `u` is parallel to the ground.
/// Only meaningful at zero roll, where the horizon is a horizontal line.
double horizon_row(const PoseParams& pose, const CameraIntrinsics& K);

/// Partial derivatives of project() w.r.t. (pitch, roll, height); rows are (u, v).
struct PoseJacobian {
  double d[2][3];
};
PoseJacobian project_jacobian(const GroundPoint& p, const PoseParams& pose, const CameraIntrinsics& K);
/// Partial derivatives of backproject() w.r.t. (pitch, roll, height); rows are (x, z).
PoseJacobian backproject_jacobian(const ImagePoint& m, const PoseParams& pose, const CameraIntrinsics& K);

}  // namespace groundpose
