#include "groundpose/pipeline.hpp"

#include "groundpose/ipm.hpp"

namespace groundpose {

namespace {

void finish(EstimationResult& out, const StageResult& stage) {
  out.params = stage.params;
  out.rms = stage.rms;
  out.inliers = stage.inliers;
  out.iterations = stage.iterations;
}

std::vector<ImagePoint> predicted_offsets(const DisplacementField& field, std::span<const ImagePoint> anchors,
                                          const ParamVector& params, double height, const CameraIntrinsics& K) {
  std::vector<ImagePoint> offsets;
  offsets.reserve(anchors.size());
  for (const auto& a : anchors)
    offsets.push_back(predicted_displacement(field, a, params, height, K).value_or(ImagePoint{}));
  return offsets;
}

StageResult image_stage(const ImageBuffer& prev, const ImageBuffer& cur, const CameraIntrinsics& K,
                        const EstimatorConfig& config, std::span<const ImagePoint> points, const MotionPrior& prior) {
  const double h = config.height_mm;
  ParamVector guess{prior.pitch, 0.0, prior.pitch, 0.0, prior.motion.tx, prior.motion.tz, 0.0};
  ParamVector init = ParamVector::initial(config.initial_pitch);
  FlowOptions flow;
  flow.patch_size = config.patch_size_image;
  flow.exec = config.exec;
  RobustOptions robust = config.robust;
  robust.exec = config.exec;

  StageResult stage;
  for (int pass = 0; pass < std::max(1, config.image_passes); ++pass) {
    DisplacementField field;
    field.plane = Plane::Image;
    const auto offsets = predicted_offsets(field, points, guess, h, K);
    field.entries = register_patches(prev, nullptr, cur, nullptr, points, offsets, flow);
    for (std::size_t i = 0; i < offsets.size(); ++i) field.entries[i].predicted = offsets[i];
    if (config.field_hook) config.field_hook("initial", field);
    stage = robust_estimate(std::move(field), init, h, K, robust);
    guess = init = stage.params;
  }
  stage.name = "initial";
  return stage;
}

StageResult ipm_stage(const ImageBuffer& prev, const ImageBuffer& cur, const CameraIntrinsics& K,
                      const EstimatorConfig& config, std::span<const ImagePoint> points, const ParamVector& estimate,
                      const std::string& name) {
  const double h = config.height_mm;
  DisplacementField field;
  field.plane = Plane::Ipm;
  field.ipm = plan_ipm_pair(points, estimate, K, config);
  const auto& planes = *field.ipm;
  const WarpedImage wp = warp_to_ipm(prev, planes.prev, K, config.exec);
  const WarpedImage wc = warp_to_ipm(cur, planes.cur, K, config.exec);

  std::vector<ImagePoint> anchors;
  for (const auto& p : points)
    if (auto a = anchor_on_raster(p, planes.prev, K)) anchors.push_back(*a);
  const auto offsets = predicted_offsets(field, anchors, estimate, h, K);

  FlowOptions flow;
  flow.patch_size = config.patch_size_ipm;
  flow.exec = config.exec;
  field.entries = register_patches(wp.image, &wp.valid, wc.image, &wc.valid, anchors, offsets, flow);
  for (std::size_t i = 0; i < offsets.size(); ++i) field.entries[i].predicted = offsets[i];
  reject_by_prediction(field, config.prediction_outlier_factor, config.prediction_outlier_floor_px);
  if (config.field_hook) config.field_hook(name, field);

  RobustOptions robust = config.robust;
  robust.exec = config.exec;
  StageResult stage = robust_estimate(std::move(field), estimate, h, K, robust);
  stage.name = name;
  return stage;
}

}  // namespace

std::vector<ImagePoint> interest_points(const CameraIntrinsics& K, const EstimatorConfig& config) {
  const InterestGrid grid = make_grid(K, config.grid_rows, config.grid_cols, config.grid_margin);
  return select_ground_points(grid, config.mask ? &*config.mask : nullptr);
}

IpmPair plan_ipm_pair(std::span<const ImagePoint> points, const ParamVector& estimate, const CameraIntrinsics& K,
                      const EstimatorConfig& config) {
  return {plan_ipm(points, estimate.prev_pose(config.height_mm), K, config.ipm_scale_mm, config.patch_size_ipm),
          plan_ipm(points, estimate.cur_pose(config.height_mm), K, config.ipm_scale_mm, config.patch_size_ipm)};
}

EstimationResult estimate_pair(const ImageBuffer& prev, const ImageBuffer& cur, const CameraIntrinsics& K,
                               const EstimatorConfig& config) {
  K.validate();
  if (prev.width() != K.width || prev.height() != K.height || cur.width() != K.width || cur.height() != K.height)
    throw SizeMismatch("frame dimensions differ from the intrinsics");
  if (config.mask && (config.mask->width != K.width || config.mask->height != K.height))
    throw SizeMismatch("mask dimensions differ from the frames");

  const auto points = interest_points(K, config);
  EstimationResult out;
  std::vector<double> candidates;
  for (const double offset : config.prior_pitch_offsets) candidates.push_back(config.initial_pitch + offset);
  if (candidates.empty()) candidates.push_back(config.initial_pitch);
  out.prior = coarse_motion_prior(prev, cur, K, config.height_mm, candidates);

  out.history.push_back(image_stage(prev, cur, K, config, points, out.prior));
  finish(out, out.history.back());

  for (int k = 1; k <= config.refinements; ++k) {
    const std::string name = "refine-" + std::to_string(k);
    try {
      StageResult stage = ipm_stage(prev, cur, K, config, points, out.params, name);
      if (stage.degraded) {
        out.degraded = true;
        out.failure = name + ": no finite solution";
        break;
      }
      out.history.push_back(std::move(stage));
      finish(out, out.history.back());
    } catch (const Error& e) {
      out.degraded = true;
      out.failure = name + ": " + e.what();
      break;
    }
  }
  return out;
}

}  // namespace groundpose
