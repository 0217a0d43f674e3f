#include "groundpose/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace groundpose {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit_from_hash(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

double lattice_value(std::uint64_t octave_seed, std::int64_t ix, std::int64_t iz) {
  return unit_from_hash(splitmix64(octave_seed ^ (static_cast<std::uint64_t>(ix) * 0x9e3779b97f4a7c15ULL) ^
                                   (static_cast<std::uint64_t>(iz) * 0xc2b2ae3d27d4eb4fULL)));
}

double fade(double t) { return t * t * t * (t * (t * 6.0 - 15.0) + 10.0); }

double value_noise(std::uint64_t octave_seed, double x, double z) {
  const double fx = std::floor(x), fz = std::floor(z);
  const auto ix = static_cast<std::int64_t>(fx);
  const auto iz = static_cast<std::int64_t>(fz);
  const double sx = fade(x - fx), sz = fade(z - fz);
  const double v00 = lattice_value(octave_seed, ix, iz);
  const double v10 = lattice_value(octave_seed, ix + 1, iz);
  const double v01 = lattice_value(octave_seed, ix, iz + 1);
  const double v11 = lattice_value(octave_seed, ix + 1, iz + 1);
  const double a = v00 + sx * (v10 - v00);
  const double b = v01 + sx * (v11 - v01);
  return a + sz * (b - a);
}

}  // namespace

double hashed_gaussian(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  const std::uint64_t h1 = splitmix64(splitmix64(seed ^ splitmix64(a)) ^ b);
  const std::uint64_t h2 = splitmix64(h1 ^ 0x5851f42d4c957f2dULL);
  const double u1 = (static_cast<double>(h1 >> 11) + 0.5) * 0x1.0p-53;
  const double u2 = unit_from_hash(h2);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

TextureSampler::TextureSampler(const GroundTexture& texture) : texture_(texture) {
  double weight = 1.0, spacing = texture.feature_scale_mm;
  for (int k = 0; k < texture.octaves; ++k) {
    // Each octave gets its own lattice rotation and offset.
    const std::uint64_t h = splitmix64(texture.seed + 0x632be59bd9b4e019ULL * static_cast<std::uint64_t>(k + 1));
    const double angle = 2.0 * std::numbers::pi * unit_from_hash(h);
    Octave o;
    o.seed = splitmix64(h ^ 0xa0761d6478bd642fULL);
    o.c = std::cos(angle) / spacing;
    o.s = std::sin(angle) / spacing;
    o.offset = 1000.0 * unit_from_hash(splitmix64(h));
    o.weight = weight;
    octaves_.push_back(o);
    total_ += weight;
    weight *= 0.5;
    spacing *= 0.5;
  }
}

double TextureSampler::operator()(double x, double z) const {
  double n = 0.0;
  if (texture_.mode == TextureMode::Stripe) {
    // Distance to the line through (stripe_x_mm, 0) with direction (sin a, cos a).
    const double dist =
        (x - texture_.stripe_x_mm) * std::cos(texture_.stripe_angle) - z * std::sin(texture_.stripe_angle);
    n = std::abs(dist) <= 0.5 * texture_.stripe_width_mm ? 1.0 : 0.0;
  } else {
    for (const auto& o : octaves_)
      n += o.weight * value_noise(o.seed, o.c * x + o.s * z + o.offset, o.c * z - o.s * x - o.offset);
    if (total_ > 0.0) n /= total_;
  }
  return std::clamp(0.5 + texture_.amplitude * (2.0 * n - 1.0), 0.0, 1.0);
}

double GroundTexture::sample(double x, double z) const { return TextureSampler(*this)(x, z); }

namespace {

// Per-frame constants of the pixel -> world mapping.
struct FrameMapping {
  double M[3][3];  // ground-frame ray direction = M * (u, v, 1)
  double height;
  MotionParams frame_to_world;
  double c, s;  // cos/sin of frame_to_world.yaw

  FrameMapping(const PoseParams& pose, const MotionParams& world_to_frame, const CameraIntrinsics& K)
      : height(pose.height), frame_to_world(inverse(world_to_frame)) {
    const double ct = std::cos(pose.pitch), st = std::sin(pose.pitch);
    const double cr = std::cos(pose.roll), sr = std::sin(pose.roll);
    // R_GC = Rx(-pitch) Rz(roll), K^-1 maps (u, v, 1) to the normalized ray.
    const double R[3][3] = {{cr, -sr, 0.0}, {ct * sr, ct * cr, st}, {-st * sr, -st * cr, ct}};
    const double Kinv[3][3] = {{1.0 / K.fx, 0.0, -K.cx / K.fx}, {0.0, 1.0 / K.fy, -K.cy / K.fy}, {0.0, 0.0, 1.0}};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        M[i][j] = 0.0;
        for (int k = 0; k < 3; ++k) M[i][j] += R[i][k] * Kinv[k][j];
      }
    c = std::cos(frame_to_world.yaw);
    s = std::sin(frame_to_world.yaw);
  }

  // Texture intensity seen along the ray through (u, v).
  double shade(const TextureSampler& texture, double u, double v) const {
    const double dx = M[0][0] * u + M[0][1] * v + M[0][2];
    const double dy = M[1][0] * u + M[1][1] * v + M[1][2];
    const double dz = M[2][0] * u + M[2][1] * v + M[2][2];
    const double norm = std::sqrt(dx * dx + dy * dy + dz * dz);
    if (!(dy > 1e-9 * norm)) return kSkyIntensity;
    const double t = height / dy;
    const double gx = t * dx, gz = t * dz;
    const double wx = c * gx + s * gz - frame_to_world.tx;
    const double wz = c * gz - s * gx - frame_to_world.tz;
    return texture(wx, wz);
  }
};

}  // namespace

ImageBuffer render_frame(const GroundTexture& texture, const PoseParams& pose, const MotionParams& world_to_frame,
                         const CameraIntrinsics& K, double noise_sigma, std::uint64_t noise_seed,
                         std::uint64_t frame_key, int supersample, Exec exec) {
  const int ss = std::max(1, supersample);
  const FrameMapping map(pose, world_to_frame, K);
  const TextureSampler sampler(texture);
  ImageBuffer out(K.width, K.height);
  auto render_row = [&](int y) {
    auto row = out.row(y);
    for (int x = 0; x < K.width; ++x) {
      double acc = 0.0;
      for (int b = 0; b < ss; ++b) {
        const double v = y - 0.5 + (b + 0.5) / ss;
        for (int a = 0; a < ss; ++a) acc += map.shade(sampler, x - 0.5 + (a + 0.5) / ss, v);
      }
      double value = acc / (ss * ss);
      if (noise_sigma > 0.0)
        value += noise_sigma *
                 hashed_gaussian(noise_seed, frame_key,
                                 static_cast<std::uint64_t>(y) * static_cast<std::uint64_t>(K.width) +
                                     static_cast<std::uint64_t>(x));
      row[static_cast<std::size_t>(x)] = static_cast<float>(std::clamp(value, 0.0, 1.0));
    }
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (int y = 0; y < K.height; ++y) render_row(y);
  } else {
    for (int y = 0; y < K.height; ++y) render_row(y);
  }
  return out;
}

std::pair<ImageBuffer, ImageBuffer> render(const Scenario& scenario, Exec exec) {
  const auto& sc = scenario;
  return {render_frame(sc.texture, sc.prev, MotionParams{}, sc.K, sc.noise_sigma, sc.noise_seed, 0, sc.supersample,
                       exec),
          render_frame(sc.texture, sc.cur, sc.motion, sc.K, sc.noise_sigma, sc.noise_seed, 1, sc.supersample, exec)};
}

DisplacementField exact_field(const Scenario& scenario, std::span<const ImagePoint> points, Plane plane,
                              const std::optional<IpmPair>& planes) {
  DisplacementField field;
  field.plane = plane;
  if (plane == Plane::Ipm) {
    if (!planes) throw std::invalid_argument("IPM exact field needs the plane pair");
    field.ipm = planes;
  }
  const auto& K = scenario.K;
  for (const auto& m : points) {
    FieldEntry e;
    e.d.confidence = 1.0;
    if (plane == Plane::Image) {
      e.anchor = m;
      const auto g = try_backproject(m, scenario.prev, K);
      if (!g) continue;
      const auto mc = try_project(motion_transform(*g, scenario.motion), scenario.cur, K);
      if (!mc) continue;
      e.d.dx = mc->u - m.u;
      e.d.dy = mc->v - m.v;
    } else {
      const auto anchor = anchor_on_raster(m, planes->prev, K);
      if (!anchor) continue;
      e.anchor = *anchor;
      // raster -> image (estimate) -> ground (truth) -> motion -> image (truth) -> raster (estimate)
      const auto m_prev = try_project(raster_to_ground(planes->prev, *anchor), planes->prev.pose_used, K);
      if (!m_prev) continue;
      const auto g_prev = try_backproject(*m_prev, scenario.prev, K);
      if (!g_prev) continue;
      const auto m_cur = try_project(motion_transform(*g_prev, scenario.motion), scenario.cur, K);
      if (!m_cur) continue;
      const auto g_cur = try_backproject(*m_cur, planes->cur.pose_used, K);
      if (!g_cur) continue;
      const ImagePoint r = ground_to_raster(planes->cur, *g_cur);
      e.d.dx = r.u - anchor->u;
      e.d.dy = r.v - anchor->v;
    }
    e.patch_size = 0;
    field.entries.push_back(e);
  }
  return field;
}

}  // namespace groundpose
