#include "groundpose/ipm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace groundpose {

IpmPlaneSpec plan_ipm(std::span<const ImagePoint> points, const PoseParams& pose, const CameraIntrinsics& K,
                      double scale, int patch_size) {
  if (!(scale > 0.0)) throw std::invalid_argument("IPM scale must be positive");
  if (points.empty()) throw std::invalid_argument("no interest points to plan an IPM plane from");

  double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
  double z_min = x_min, z_max = -x_min;
  for (const auto& m : points) {
    const GroundPoint g = backproject(m, pose, K);
    x_min = std::min(x_min, g.x);
    x_max = std::max(x_max, g.x);
    z_min = std::min(z_min, g.z);
    z_max = std::max(z_max, g.z);
  }
  const double pad = (patch_size / 2) * scale;
  IpmPlaneSpec spec;
  spec.scale = scale;
  spec.pose_used = pose;
  spec.origin = {x_min - pad, z_max + pad};
  const double w = std::ceil((x_max - x_min + 2.0 * pad) / scale) + 1.0;
  const double h = std::ceil((z_max - z_min + 2.0 * pad) / scale) + 1.0;
  spec.width = static_cast<int>(std::min(w, static_cast<double>(kMaxIpmDimension)));
  spec.height = static_cast<int>(std::min(h, static_cast<double>(kMaxIpmDimension)));
  return spec;
}

std::optional<ImagePoint> anchor_on_raster(const ImagePoint& m, const IpmPlaneSpec& spec, const CameraIntrinsics& K) {
  const auto g = try_backproject(m, spec.pose_used, K);
  if (!g) return std::nullopt;
  const ImagePoint px = ground_to_raster(spec, *g);
  return ImagePoint{std::round(px.u), std::round(px.v)};
}

namespace {

void warp_row(const ImageBuffer& img, const IpmPlaneSpec& spec, const CameraIntrinsics& K, int j,
              WarpedImage& out) {
  auto dst = out.image.row(j);
  for (int i = 0; i < spec.width; ++i) {
    const GroundPoint g = raster_to_ground(spec, ImagePoint{static_cast<double>(i), static_cast<double>(j)});
    const auto m = try_project(g, spec.pose_used, K);
    if (m && inside_for_bilinear(img, m->u, m->v)) {
      dst[static_cast<std::size_t>(i)] = sample_bilinear(img, m->u, m->v);
      out.valid.at(i, j) = 1;
    } else {
      dst[static_cast<std::size_t>(i)] = 0.0f;
      out.valid.at(i, j) = 0;
    }
  }
}

}  // namespace

WarpedImage warp_to_ipm(const ImageBuffer& img, const IpmPlaneSpec& spec, const CameraIntrinsics& K, Exec exec) {
  WarpedImage out{ImageBuffer(spec.width, spec.height), Mask(spec.width, spec.height, 0)};
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (int j = 0; j < spec.height; ++j) warp_row(img, spec, K, j, out);
  } else {
    for (int j = 0; j < spec.height; ++j) warp_row(img, spec, K, j, out);
  }
  return out;
}

}  // namespace groundpose
