#pragma once

// Virtual inverse perspective mapping: a metric bird's-eye raster of the
// ground induced by a (possibly estimated) pose.
//
// Raster pixel (i, j) images the ground point
//   x = origin.x + i * scale,  z = origin.z - j * scale
// so far ground is at the top of the raster.

#include <optional>
#include <span>

#include "groundpose/exec.hpp"
#include "groundpose/image.hpp"

namespace groundpose {

struct IpmPlaneSpec {
  double scale = 2.0;  ///< mm per raster pixel
  GroundPoint origin;  ///< ground point at raster pixel (0, 0)
  int width = 0;
  int height = 0;
  PoseParams pose_used;
};

template <typename T>
BasicGroundPoint<T> raster_to_ground(const IpmPlaneSpec& spec, const BasicImagePoint<T>& px) {
  return {spec.origin.x + px.u * spec.scale, spec.origin.z - px.v * spec.scale};
}

template <typename T>
BasicImagePoint<T> ground_to_raster(const IpmPlaneSpec& spec, const BasicGroundPoint<T>& g) {
  return {(g.x - spec.origin.x) / spec.scale, (spec.origin.z - g.z) / spec.scale};
}

inline constexpr int kMaxIpmDimension = 4096;

/// Raster bounds = bounding box of the back-projected points, padded by
/// patch_size / 2 pixels on every side. Throws AboveHorizon when a point does
/// not reach the ground under `pose`; dimensions are capped at kMaxIpmDimension.
IpmPlaneSpec plan_ipm(std::span<const ImagePoint> points, const PoseParams& pose, const CameraIntrinsics& K,
                      double scale, int patch_size = 256);

/// Rounded raster pixel imaging the ground point seen at image point `m`
/// under spec.pose_used; nullopt above the horizon.
std::optional<ImagePoint> anchor_on_raster(const ImagePoint& m, const IpmPlaneSpec& spec, const CameraIntrinsics& K);

struct WarpedImage {
  ImageBuffer image;
  Mask valid;  ///< 0 where the raster pixel projects outside the source image
};

/// Bilinear resampling of `img` onto the raster of `spec`. Rows are
/// independent, so the parallel path splits by output row.
WarpedImage warp_to_ipm(const ImageBuffer& img, const IpmPlaneSpec& spec, const CameraIntrinsics& K,
                        Exec exec = Exec::Parallel);

}  // namespace groundpose
