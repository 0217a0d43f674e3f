#include "groundpose/flow.hpp"

#include <algorithm>
#include <cmath>

#include "groundpose/ipm.hpp"

namespace groundpose {

namespace {

int fitting_size(const ImagePoint& center, int max_size, int width, int height) {
  const PatchSpec spec = shrink_to_fit({center, max_size, true}, width, height);
  return spec.valid ? spec.size : 0;
}

bool usable(const Mask* valid, const ImagePoint& center, int size, double min_coverage) {
  return !valid || coverage(*valid, window_at(center, size)) >= min_coverage;
}

FieldEntry register_one(const ImageBuffer& ref, const Mask* ref_valid, const ImageBuffer& cur, const Mask* cur_valid,
                        const ImagePoint& anchor, const ImagePoint& offset, const FlowOptions& options) {
  FieldEntry e;
  e.anchor = anchor;
  e.valid = false;
  const ImagePoint shift{std::round(offset.u), std::round(offset.v)};
  const ImagePoint target{anchor.u + shift.u, anchor.v + shift.v};
  int size = std::min(fitting_size(anchor, options.patch_size, ref.width(), ref.height()),
                      fitting_size(target, options.patch_size, cur.width(), cur.height()));
  // Keep halving while either window reaches into invalid pixels.
  while (size >= kMinPatchSize && !(usable(ref_valid, anchor, size, options.min_coverage) &&
                                    usable(cur_valid, target, size, options.min_coverage)))
    size /= 2;
  e.patch_size = size;
  if (size < kMinPatchSize) return e;
  try {
    const Displacement d = poc_register(crop_patch(ref, anchor, size), crop_patch(cur, target, size), options.poc);
    e.d = {shift.u + d.dx, shift.v + d.dy, d.confidence};
    e.valid = true;
  } catch (const DegeneratePatch&) {
  }
  return e;
}

}  // namespace

std::vector<FieldEntry> register_patches(const ImageBuffer& ref, const Mask* ref_valid, const ImageBuffer& cur,
                                         const Mask* cur_valid, std::span<const ImagePoint> anchors,
                                         std::span<const ImagePoint> offsets, const FlowOptions& options) {
  if (!offsets.empty() && offsets.size() != anchors.size())
    throw std::invalid_argument("one offset per anchor required");
  std::vector<FieldEntry> entries(anchors.size());
  auto one = [&](std::size_t i) {
    entries[i] = register_one(ref, ref_valid, cur, cur_valid, anchors[i], offsets.empty() ? ImagePoint{} : offsets[i],
                              options);
  };
  const auto n = static_cast<std::ptrdiff_t>(anchors.size());
  if (options.exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) one(static_cast<std::size_t>(i));
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) one(static_cast<std::size_t>(i));
  }
  return entries;
}

namespace {

// Replaces invalid pixels by the mean of the valid ones.
ImageBuffer mean_filled(const WarpedImage& w) {
  double sum = 0.0;
  std::size_t count = 0;
  const auto px = w.image.pixels();
  for (std::size_t i = 0; i < px.size(); ++i)
    if (w.valid.bits[i]) {
      sum += px[i];
      ++count;
    }
  const auto fill = static_cast<float>(count ? sum / static_cast<double>(count) : 0.0);
  ImageBuffer out = w.image;
  auto dst = out.pixels();
  for (std::size_t i = 0; i < dst.size(); ++i)
    if (!w.valid.bits[i]) dst[i] = fill;
  return out;
}

// Square raster centered on the ground rectangle seen by the lower image
// part under `pose`.
std::optional<IpmPlaneSpec> coarse_plane(const PoseParams& pose, const CameraIntrinsics& K, int size) {
  const double margin = 16.0;
  const double bottom = K.height - 1 - margin;
  const double top = std::max(margin, horizon_row(pose, K) + 0.2 * K.fy);
  if (top >= bottom) return std::nullopt;
  const auto near_left = try_backproject(ImagePoint{margin, bottom}, pose, K);
  const auto near_right = try_backproject(ImagePoint{K.width - 1 - margin, bottom}, pose, K);
  const auto far = try_backproject(ImagePoint{K.cx, top}, pose, K);
  if (!near_left || !near_right || !far) return std::nullopt;
  const double z_near = std::max(near_left->z, near_right->z);
  const double z_far = std::min(far->z, 6.0 * pose.height);
  const double x_left = near_left->x, x_right = near_right->x;
  if (!(z_far > z_near) || !(x_right > x_left)) return std::nullopt;
  IpmPlaneSpec spec;
  spec.scale = std::max(x_right - x_left, z_far - z_near) / size;
  spec.width = spec.height = size;
  spec.origin = {0.5 * (x_left + x_right) - 0.5 * size * spec.scale, 0.5 * (z_near + z_far) + 0.5 * size * spec.scale};
  spec.pose_used = pose;
  return spec;
}

}  // namespace

MotionPrior coarse_motion_prior(const ImageBuffer& prev, const ImageBuffer& cur, const CameraIntrinsics& K,
                                double height, std::span<const double> pitch_candidates, int raster_size) {
  MotionPrior best;
  best.confidence = -1.0;
  for (const double pitch : pitch_candidates) {
    const auto spec = coarse_plane(PoseParams{pitch, 0.0, height}, K, raster_size);
    if (!spec) continue;
    const ImageBuffer a = mean_filled(warp_to_ipm(prev, *spec, K, Exec::Serial));
    const ImageBuffer b = mean_filled(warp_to_ipm(cur, *spec, K, Exec::Serial));
    Displacement d;
    try {
      d = poc_register(a, b);
    } catch (const DegeneratePatch&) {
      continue;
    }
    if (d.confidence > best.confidence) {
      best.pitch = pitch;
      best.motion = {-d.dx * spec->scale, d.dy * spec->scale, 0.0};
      best.confidence = d.confidence;
    }
  }
  if (best.confidence < 0.0) {
    best.confidence = 0.0;
    best.pitch = pitch_candidates.empty() ? 0.0 : pitch_candidates.front();
  }
  return best;
}

}  // namespace groundpose
