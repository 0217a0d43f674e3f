#include <doctest.h>

#include "groundpose/pipeline.hpp"
#include "support.hpp"

using namespace groundpose;
using namespace groundpose::testing;

namespace {

struct Rendered {
  Scenario sc;
  ImageBuffer prev, cur;
};

const Rendered& reference_pair() {
  static const Rendered r = [] {
    Rendered out{reference_scenario(), {}, {}};
    std::tie(out.prev, out.cur) = render(out.sc);
    return out;
  }();
  return r;
}

double pose_error_deg(const ParamVector& p, const Scenario& sc) {
  return (std::abs(p.pitch_prev - sc.prev.pitch) + std::abs(p.pitch_cur - sc.cur.pitch) +
          std::abs(p.roll_prev - sc.prev.roll) + std::abs(p.roll_cur - sc.cur.roll)) /
         kDeg;
}

double distance_error(const ParamVector& p, const Scenario& sc) {
  return std::abs(std::hypot(p.tx, p.tz) - std::hypot(sc.motion.tx, sc.motion.tz));
}

}  // namespace

TEST_CASE("refinement improves on the image-plane estimate") {
  const Rendered& r = reference_pair();
  const EstimationResult res = estimate_pair(r.prev, r.cur, r.sc.K, EstimatorConfig{});
  CHECK_FALSE(res.degraded);
  REQUIRE(res.history.size() == 3);
  CHECK(res.history[0].name == "initial");
  CHECK(res.history[1].name == "refine-1");
  CHECK(res.history[2].name == "refine-2");
  CHECK(res.history[0].field.plane == Plane::Image);
  CHECK(res.history[1].field.plane == Plane::Ipm);
  CHECK(res.params == res.history.back().params);
  const double e0 = pose_error_deg(res.history[0].params, r.sc);
  const double e2 = pose_error_deg(res.history[2].params, r.sc);
  CHECK(e2 < e0);
  CHECK(pose_error_deg(res.params, r.sc) < 4 * 0.5);
  CHECK(distance_error(res.params, r.sc) < 1.0);
  CHECK(res.inliers >= 30);
}

TEST_CASE("identical frames keep the initial guess") {
  const Rendered& r = reference_pair();
  const EstimationResult res = estimate_pair(r.prev, r.prev, r.sc.K, EstimatorConfig{});
  CHECK_FALSE(res.degraded);
  CHECK(std::abs(res.params.tx) < 1e-6);
  CHECK(std::abs(res.params.tz) < 1e-6);
  CHECK(std::abs(res.params.yaw) < 1e-9);
  CHECK(std::abs(res.params.pitch_prev - res.params.pitch_cur) < 1e-9);
}

TEST_CASE("a failed refinement keeps the last good stage") {
  const Rendered& r = reference_pair();
  EstimatorConfig config;
  config.field_hook = [](const std::string& stage, DisplacementField& field) {
    if (stage == "refine-2")
      for (auto& e : field.entries) e.valid = false;
  };
  const EstimationResult res = estimate_pair(r.prev, r.cur, r.sc.K, config);
  CHECK(res.degraded);
  CHECK_FALSE(res.failure.empty());
  REQUIRE(res.history.size() == 2);
  CHECK(res.params == res.history[1].params);
}

TEST_CASE("an unusable image-plane field is an error") {
  const Rendered& r = reference_pair();
  EstimatorConfig config;
  config.field_hook = [](const std::string& stage, DisplacementField& field) {
    if (stage == "initial")
      for (std::size_t i = 3; i < field.entries.size(); ++i) field.entries[i].valid = false;
  };
  CHECK_THROWS_AS(estimate_pair(r.prev, r.cur, r.sc.K, config), InsufficientInliers);
}

TEST_CASE("input validation") {
  const Rendered& r = reference_pair();
  CHECK_THROWS_AS(estimate_pair(r.prev, ImageBuffer(640, 480), r.sc.K, EstimatorConfig{}), SizeMismatch);
  CameraIntrinsics bad = r.sc.K;
  bad.fx = -1.0;
  CHECK_THROWS(estimate_pair(r.prev, r.cur, bad, EstimatorConfig{}));
}

TEST_CASE("serial and parallel estimates agree bitwise") {
  const Rendered& r = reference_pair();
  EstimatorConfig serial, parallel;
  serial.exec = serial.robust.exec = Exec::Serial;
  parallel.exec = parallel.robust.exec = Exec::Parallel;
  const EstimationResult a = estimate_pair(r.prev, r.cur, r.sc.K, serial);
  const EstimationResult b = estimate_pair(r.prev, r.cur, r.sc.K, parallel);
  CHECK(a.params == b.params);
  CHECK(a.rms == b.rms);
  CHECK(a.inliers == b.inliers);
}

TEST_CASE("a ground mask restricts the interest points") {
  const Rendered& r = reference_pair();
  EstimatorConfig config;
  CHECK(interest_points(r.sc.K, config).size() == 99);
  Mask mask(800, 600, 0);
  for (int y = 250; y < 600; ++y)
    for (int x = 0; x < 800; ++x) mask.at(x, y) = 1;
  config.mask = mask;
  const auto pts = interest_points(r.sc.K, config);
  CHECK(pts.size() == 5 * 11);  // rows at v = 300 .. 536
  for (const auto& p : pts) CHECK(p.v >= 250.0);
  const EstimationResult res = estimate_pair(r.prev, r.cur, r.sc.K, config);
  for (const auto& e : res.history[0].field.entries) CHECK(e.anchor.v >= 250.0);
  CHECK(pose_error_deg(res.params, r.sc) < 4 * 0.5);
}
