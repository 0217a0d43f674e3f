#include <doctest.h>

#include "groundpose/patch_grid.hpp"
#include "groundpose/registration.hpp"
#include "support.hpp"

using namespace groundpose;
using namespace groundpose::testing;

namespace {

double rms_difference(const ImageBuffer& a, const ImageBuffer& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.pixels().size(); ++i) {
    const double d = a.pixels()[i] - b.pixels()[i];
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(a.pixels().size()));
}

}  // namespace

TEST_CASE("a static scene renders identical frames") {
  Scenario sc;
  sc.prev = sc.cur = {1.1, -0.03, 700.0};
  const auto [a, b] = render(sc);
  CHECK(a == b);
}

TEST_CASE("forward motion under a nadir-like view is a uniform shift") {
  Scenario sc;
  sc.prev = sc.cur = {1.55, 0.0, 700.0};
  sc.motion = {0.0, 100.0, 0.0};
  sc.supersample = 4;
  const auto [a, b] = render(sc);
  const ImagePoint center{400.0, 300.0};
  const auto field = exact_field(sc, std::span(&center, 1), Plane::Image);
  REQUIRE(field.entries.size() == 1);
  const Displacement analytic = field.entries[0].d;
  // Ground sampling at the principal point: h / (f sin(pitch)^2) mm per pixel.
  const double s = std::sin(sc.prev.pitch);
  CHECK(std::hypot(analytic.dx, analytic.dy) == doctest::Approx(100.0 * 600.0 * s * s / 700.0).epsilon(0.01));
  CHECK(std::hypot(analytic.dx, analytic.dy) == doctest::Approx(85.714).epsilon(0.01));

  const ImagePoint moved{std::round(center.u + analytic.dx), std::round(center.v + analytic.dy)};
  const Displacement residual = poc_register(crop_patch(a, center, 128), crop_patch(b, moved, 128));
  CHECK(std::abs(moved.u - center.u + residual.dx - analytic.dx) < 0.1);
  CHECK(std::abs(moved.v - center.v + residual.dy - analytic.dy) < 0.1);
}

TEST_CASE("low-contrast texture gives a narrow histogram") {
  Scenario weak, strong;
  weak.texture.amplitude = 0.05;
  weak.noise_sigma = strong.noise_sigma = 0.01;
  weak.noise_seed = strong.noise_seed = 4;
  const ImageBuffer w = render(weak).first, s = render(strong).first;
  auto ground_rows = [](const ImageBuffer& img) {
    std::vector<float> v;
    for (int y = 150; y < img.height(); ++y)
      for (float p : img.row(y)) v.push_back(p);
    return v;
  };
  const auto wv = ground_rows(w), sv = ground_rows(s);
  CHECK(mean(wv) == doctest::Approx(0.5).epsilon(0.02));
  const double wsd = std::sqrt(variance(wv)), ssd = std::sqrt(variance(sv));
  CHECK(wsd < 0.04);
  CHECK(wsd > 0.01);
  CHECK(ssd > 5.0 * wsd);
  std::size_t outside = 0;
  for (float p : wv)
    if (p < 0.35f || p > 0.65f) ++outside;
  CHECK(outside == 0);
}

TEST_CASE("sky above the horizon is constant") {
  Scenario sc;
  sc.prev = sc.cur = {0.3, 0.0, 700.0};
  sc.noise_sigma = 0.0;
  const ImageBuffer img = render(sc).first;
  const int horizon = static_cast<int>(std::floor(horizon_row(sc.prev, sc.K)));
  REQUIRE(horizon > 10);
  for (int y = 0; y < horizon - 1; ++y)
    for (float p : img.row(y)) CHECK(p == kSkyIntensity);
}

TEST_CASE("rendering is deterministic and exec-independent") {
  const Scenario sc = reference_scenario();
  const auto [a1, b1] = render(sc, Exec::Parallel);
  const auto [a2, b2] = render(sc, Exec::Parallel);
  const auto [a3, b3] = render(sc, Exec::Serial);
  CHECK(a1 == a2);
  CHECK(b1 == b2);
  CHECK(a1 == a3);
  CHECK(b1 == b3);
  Scenario other = sc;
  other.noise_seed += 1;
  CHECK_FALSE(render(other).first == a1);
  for (float p : a1.pixels()) {
    CHECK(p >= 0.0f);
    CHECK(p <= 1.0f);
  }
}

TEST_CASE("supersampling has converged") {
  Scenario sc = reference_scenario();
  sc.noise_sigma = 0.0;
  const ImageBuffer two = render_frame(sc.texture, sc.prev, MotionParams{}, sc.K, 0.0, 0, 0, 2);
  const ImageBuffer four = render_frame(sc.texture, sc.prev, MotionParams{}, sc.K, 0.0, 0, 0, 4);
  CHECK(rms_difference(two, four) < 0.01);
}

TEST_CASE("exact fields") {
  Scenario sc;
  sc.prev = sc.cur = {1.0, 0.02, 700.0};
  const auto pts = make_grid(sc.K, 9, 11, 64.0).points;
  const auto still = exact_field(sc, pts, Plane::Image);
  REQUIRE(still.entries.size() == pts.size());
  for (const auto& e : still.entries) {
    CHECK(std::abs(e.d.dx) < 1e-9);
    CHECK(std::abs(e.d.dy) < 1e-9);
    CHECK(e.d.confidence == 1.0);
  }

  // Points above the horizon are left out.
  sc.prev = sc.cur = {0.3, 0.0, 700.0};
  const auto shallow = exact_field(sc, pts, Plane::Image);
  CHECK(shallow.entries.size() < pts.size());
  for (const auto& e : shallow.entries) CHECK(e.anchor.v > horizon_row(sc.prev, sc.K));

  const Scenario ref = reference_scenario();
  const auto field = exact_field(ref, pts, Plane::Image);
  const auto cost = field_cost(field, ref.truth(), 700.0, ref.K);
  REQUIRE(cost);
  CHECK(*cost < 1e-12);
}

TEST_CASE("hashed Gaussian noise statistics") {
  const int n = 200000;
  double s = 0.0, s2 = 0.0, s4 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = hashed_gaussian(11, 3, static_cast<std::uint64_t>(i));
    s += g;
    s2 += g * g;
    s4 += g * g * g * g;
  }
  CHECK(std::abs(s / n) < 0.01);
  CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.02));
  CHECK(s4 / n == doctest::Approx(3.0).epsilon(0.05));
  CHECK(hashed_gaussian(1, 2, 3) == hashed_gaussian(1, 2, 3));
  CHECK(hashed_gaussian(1, 2, 3) != hashed_gaussian(1, 2, 4));
}

TEST_CASE("texture sampler agrees with direct sampling") {
  GroundTexture t;
  t.seed = 77;
  const TextureSampler fast(t);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double x = uniform(rng, -3000, 3000), z = uniform(rng, -3000, 3000);
    CHECK(fast(x, z) == doctest::Approx(t.sample(x, z)).epsilon(1e-12));
    CHECK(fast(x, z) >= 0.0);
    CHECK(fast(x, z) <= 1.0);
  }
}
