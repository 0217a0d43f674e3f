#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "groundpose/synth.hpp"

namespace groundpose::testing {

inline constexpr double kDeg = std::numbers::pi / 180.0;

/// Box-filtered view of a texture: pixel (i, j) averages ss x ss samples
/// over [x0 + (i - 0.5) p, x0 + (i + 0.5) p] x [z0 + (j - 0.5) p, ...].
inline ImageBuffer render_patch(const TextureSampler& texture, int size, double x0, double z0, double pixel_mm,
                                int ss) {
  ImageBuffer img(size, size);
  for (int j = 0; j < size; ++j)
    for (int i = 0; i < size; ++i) {
      double acc = 0.0;
      for (int b = 0; b < ss; ++b)
        for (int a = 0; a < ss; ++a)
          acc += texture(x0 + (i - 0.5 + (a + 0.5) / ss) * pixel_mm, z0 + (j - 0.5 + (b + 0.5) / ss) * pixel_mm);
      img.at(i, j) = static_cast<float>(acc / (ss * ss));
    }
  return img;
}

/// Content moved by (+dx, +dy) pixels with wrap-around.
inline ImageBuffer circular_shift(const ImageBuffer& img, int dx, int dy) {
  const int w = img.width(), h = img.height();
  ImageBuffer out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) out.at(((x + dx) % w + w) % w, ((y + dy) % h + h) % h) = img.at(x, y);
  return out;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Scenario reference_scenario() {
  Scenario sc;
  sc.prev = {1.1, 0.05, 700.0};
  sc.cur = {1.1, 0.05, 700.0};
  sc.motion = {20.0, 150.0, 0.01};
  sc.noise_sigma = 0.01;
  return sc;
}

}  // namespace groundpose::testing
