#include "groundpose/app/overlay.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "groundpose/app/sequence.hpp"
#include "groundpose/ipm.hpp"

namespace groundpose::app {

namespace fs = std::filesystem;

namespace {

void draw_line(RgbImage& img, double x0, double y0, double x1, double y1, const std::uint8_t* c) {
  const int n = static_cast<int>(std::ceil(std::max(std::abs(x1 - x0), std::abs(y1 - y0)))) + 1;
  for (int i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    img.set(static_cast<int>(std::lround(x0 + t * (x1 - x0))), static_cast<int>(std::lround(y0 + t * (y1 - y0))),
            c[0], c[1], c[2]);
  }
}

}  // namespace

RgbImage flow_overlay(const ImageBuffer& base, const DisplacementField& field, double factor) {
  RgbImage img(base.width(), base.height());
  for (int y = 0; y < base.height(); ++y)
    for (int x = 0; x < base.width(); ++x) {
      // Dimmed so colored vectors stay distinct from the texture.
      const auto g = static_cast<std::uint8_t>(std::lround(std::clamp(base.at(x, y), 0.0f, 1.0f) * 180.0));
      img.set(x, y, g, g, g);
    }
  for (const auto& e : field.entries) {
    if (!e.valid) continue;
    const std::uint8_t* c = e.inlier ? kInlierColor : kOutlierColor;
    draw_line(img, e.anchor.u, e.anchor.v, e.anchor.u + factor * e.d.dx, e.anchor.v + factor * e.d.dy, c);
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx)
        img.set(static_cast<int>(e.anchor.u) + dx, static_cast<int>(e.anchor.v) + dy, c[0], c[1], c[2]);
  }
  return img;
}

std::vector<fs::path> write_overlays(const RunConfig& config, int pair, double factor) {
  validate(config);
  const Frames frames = select_frames(config);
  if (pair < 0 || static_cast<std::size_t>(pair) + 1 >= frames.paths.size())
    throw ConfigError("pair index " + std::to_string(pair) + " out of range");
  const ImageBuffer prev = read_image(frames.paths[static_cast<std::size_t>(pair)]);
  const ImageBuffer cur = read_image(frames.paths[static_cast<std::size_t>(pair) + 1]);
  const CameraIntrinsics K = intrinsics(config, prev.width(), prev.height());
  std::optional<Mask> mask;
  if (!config.mask.empty()) mask = read_mask(config.mask);
  const EstimationResult est = estimate_pair(prev, cur, K, estimator_config(config, mask));

  const fs::path dir = fs::path(config.output) / "overlay";
  fs::create_directories(dir);
  std::vector<fs::path> written;
  for (const auto& stage : est.history) {
    const ImageBuffer base =
        stage.field.plane == Plane::Image ? prev : warp_to_ipm(prev, stage.field.ipm->prev, K).image;
    char name[64];
    std::snprintf(name, sizeof name, "pair_%05d_%s.png", frames.indices[static_cast<std::size_t>(pair) + 1],
                  stage.name.c_str());
    write_png(dir / name, flow_overlay(base, stage.field, factor));
    written.push_back(dir / name);
  }
  return written;
}

}  // namespace groundpose::app
