#include "groundpose/geometry.hpp"

#include <numbers>
#include <stdexcept>

namespace groundpose {

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) throw std::invalid_argument("focal lengths must be positive");
  if (width <= 0 || height <= 0) throw std::invalid_argument("image dimensions must be positive");
  if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height))
    throw std::invalid_argument("principal point outside the image");
}

void validate(const PoseParams& pose) {
  constexpr double pi = std::numbers::pi;
  if (!(pose.pitch > 0.0 && pose.pitch < pi)) throw std::invalid_argument("pitch outside (0, pi)");
  if (!(pose.roll > -pi / 2 && pose.roll < pi / 2)) throw std::invalid_argument("roll outside (-pi/2, pi/2)");
  if (!(pose.height > 0.0)) throw std::invalid_argument("height must be positive");
}

ImagePoint project(const GroundPoint& p, const PoseParams& pose, const CameraIntrinsics& K) {
  auto m = try_project(p, pose, K);
  if (!m) throw NonPositiveDepth();
  return *m;
}

GroundPoint backproject(const ImagePoint& m, const PoseParams& pose, const CameraIntrinsics& K) {
  auto g = try_backproject(m, pose, K);
  if (!g) throw AboveHorizon();
  return *g;
}

GroundPoint motion_transform(const GroundPoint& p, const MotionParams& motion) {
  return motion_transform<double, double>(p, motion);
}

MotionParams inverse(const MotionParams& m) {
  // p = R(-yaw) (p' + t)
  const double c = std::cos(m.yaw), s = std::sin(m.yaw);
  const double bx = c * m.tx - s * m.tz;
  const double bz = s * m.tx + c * m.tz;
  return {-bx, -bz, -m.yaw};
}

MotionParams compose(const MotionParams& first, const MotionParams& second) {
  // second(first(p)) = R2 (R1 p - t1) - t2 = R2 R1 p - (R2 t1 + t2)
  const double c = std::cos(second.yaw), s = std::sin(second.yaw);
  return {c * first.tx + s * first.tz + second.tx, c * first.tz - s * first.tx + second.tz,
          first.yaw + second.yaw};
}

double horizon_row(const PoseParams& pose, const CameraIntrinsics& K) {
  return K.cy - K.fy * std::tan(pose.pitch);
}

namespace {

using Jet3 = Jet<3>;

BasicPose<Jet3> seeded(const PoseParams& pose) {
  return {Jet3::variable(pose.pitch, 0), Jet3::variable(pose.roll, 1), Jet3::variable(pose.height, 2)};
}

}  // namespace

PoseJacobian project_jacobian(const GroundPoint& p, const PoseParams& pose, const CameraIntrinsics& K) {
  const BasicGroundPoint<Jet3> pj{Jet3(p.x), Jet3(p.z)};
  auto m = try_project(pj, seeded(pose), K);
  if (!m) throw NonPositiveDepth();
  PoseJacobian J{};
  for (int k = 0; k < 3; ++k) {
    J.d[0][k] = m->u.v[k];
    J.d[1][k] = m->v.v[k];
  }
  return J;
}

PoseJacobian backproject_jacobian(const ImagePoint& m, const PoseParams& pose, const CameraIntrinsics& K) {
  const BasicImagePoint<Jet3> mj{Jet3(m.u), Jet3(m.v)};
  auto g = try_backproject(mj, seeded(pose), K);
  if (!g) throw AboveHorizon();
  PoseJacobian J{};
  for (int k = 0; k < 3; ++k) {
    J.d[0][k] = g->x.v[k];
    J.d[1][k] = g->z.v[k];
  }
  return J;
}

}  // namespace groundpose
