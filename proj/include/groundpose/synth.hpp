#pragma once

// Synthetic ground-plane scenes with exactly known pose and motion.

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "groundpose/estimator.hpp"
#include "groundpose/exec.hpp"
#include "groundpose/image.hpp"

namespace groundpose {

enum class TextureMode {
  ValueNoise,  ///< 4-octave fractal value noise, rotated lattices
  Stripe,      ///< one straight painted line on a uniform floor (aperture problem)
};

/// Procedural floor intensity over ground coordinates (mm), in [0, 1].
struct GroundTexture {
  TextureMode mode = TextureMode::ValueNoise;
  std::uint64_t seed = 1;
  double feature_scale_mm = 40.0;  ///< lattice spacing of the coarsest octave
  double amplitude = 0.5;          ///< intensity = 0.5 + amplitude * (2 n - 1), clamped
  int octaves = 4;
  // Stripe mode: a line through (stripe_x_mm, 0) at stripe_angle from the z axis.
  double stripe_x_mm = 0.0;
  double stripe_angle = 0.0;
  double stripe_width_mm = 50.0;

  double sample(double x, double z) const;
};

/// GroundTexture with its octave lattices prepared once; use it for bulk sampling.
class TextureSampler {
public:
  explicit TextureSampler(const GroundTexture& texture);
  double operator()(double x, double z) const;

private:
  struct Octave {
    std::uint64_t seed;
    double c, s, offset, weight;
  };
  GroundTexture texture_;
  std::vector<Octave> octaves_;
  double total_ = 0.0;
};

inline constexpr float kSkyIntensity = 0.0f;

/// One frame pair with ground truth.
struct Scenario {
  CameraIntrinsics K;
  PoseParams prev{1.0471975511965976, 0.0, 700.0};
  PoseParams cur{1.0471975511965976, 0.0, 700.0};
  MotionParams motion;
  GroundTexture texture;
  double noise_sigma = 0.0;
  std::uint64_t noise_seed = 0;
  int supersample = 2;  ///< samples per pixel axis (2 gives 4 samples per pixel)

  double height() const { return prev.height; }
  ParamVector truth() const {
    return {prev.pitch, prev.roll, cur.pitch, cur.roll, motion.tx, motion.tz, motion.yaw};
  }
};

/// Renders the frame whose ground frame is reached from the texture's world
/// frame by `world_to_frame`. Each pixel averages supersample^2 texture samples
/// over its footprint, adds i.i.d. Gaussian noise keyed by (noise_seed,
/// frame_key, pixel) and is clamped to [0, 1]; rays above the horizon see
/// kSkyIntensity.
ImageBuffer render_frame(const GroundTexture& texture, const PoseParams& pose, const MotionParams& world_to_frame,
                         const CameraIntrinsics& K, double noise_sigma, std::uint64_t noise_seed,
                         std::uint64_t frame_key, int supersample, Exec exec = Exec::Parallel);

/// Previous frame at the world origin, current frame displaced by the motion.
std::pair<ImageBuffer, ImageBuffer> render(const Scenario& scenario, Exec exec = Exec::Parallel);

/// Noise-free displacements of `points` (image-plane anchors) between the two
/// frames. For Plane::Ipm the anchors are mapped onto planes.prev first, and
/// displacements are expressed on the virtual IPM rasters. Entries whose chain
/// leaves the ground are omitted. Confidence is 1.
DisplacementField exact_field(const Scenario& scenario, std::span<const ImagePoint> points, Plane plane,
                              const std::optional<IpmPair>& planes = std::nullopt);

/// Zero-mean unit-variance Gaussian from a counter-based hash.
double hashed_gaussian(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

}  // namespace groundpose
