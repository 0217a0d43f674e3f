#include <doctest.h>

#include <algorithm>
#include <random>

#include "groundpose/estimator.hpp"
#include "groundpose/patch_grid.hpp"
#include "support.hpp"

using namespace groundpose;
using namespace groundpose::testing;

namespace {

const CameraIntrinsics K;

std::vector<ImagePoint> grid3() { return make_grid(K, 3, 3, 64.0).points; }
std::vector<ImagePoint> grid99() { return make_grid(K, 9, 11, 64.0).points; }

Scenario oracle_scenario() {
  Scenario sc;
  sc.prev = {1.0, 0.02, 700.0};
  sc.cur = {1.02, 0.01, 700.0};
  sc.motion = {15.0, 120.0, 0.01};
  return sc;
}

IpmPair oracle_planes() {
  return {plan_ipm(grid3(), {1.03, 0.0, 700.0}, K, 2.0, 256), plan_ipm(grid3(), {0.99, 0.03, 700.0}, K, 2.0, 256)};
}

// tests/oracles/chain_oracle.py
const double kImageField[9][2] = {
    {-21.876041684712597, 23.495405110316},    {-0.07228918336056722, 29.975897829521728},
    {24.225517768386453, 36.50156252245338},   {-33.60758303603636, 59.389310632676995},
    {-7.529166887701592, 66.9036836849304},    {21.10365063281415, 74.47106935538932},
    {-45.62458061561793, 101.89903980791189},  {-15.168133678022514, 110.49607811182909},
    {17.905278596345966, 119.15451020872865}};
const double kBumpedResidual[9][2] = {
    {-1.7358365832198288, 3.8113032956745343}, {0.04899316714431734, 3.8946891369232333},
    {1.8941778208384221, 3.9795308275167116},  {-2.439625764194872, 7.0253255773488945},
    {0.01534782491302167, 7.153101361924314},  {2.5415160294767247, 7.282908032916339},
    {-3.2066355699913203, 11.337333362631512}, {-0.04700105308154434, 11.519127652050884},
    {3.195468498087621, 11.703651699063698}};
const double kIpmField[9][4] = {
    {128, 128, -10.466705191081417, 34.482598784227775}, {427, 128, 19.98584921386805, 58.98263511194216},
    {727, 128, 36.99210840306091, 82.5570914711472},     {199, 373, -2.870759781795101, 73.88395339211274},
    {427, 373, 8.3116613466986, 87.42567315907888},      {656, 373, 12.31528799379521, 100.61756996259328},
    {242, 525, -1.9215816823706575, 84.77908580163148},  {427, 525, 1.5621541852597147, 93.51853276904137},
    {612, 525, 0.5598627168851635, 102.04997559319247}};

// Randomized pose/motion in the operating envelope.
Scenario random_scenario(std::mt19937_64& rng) {
  Scenario sc;
  sc.prev = {uniform(rng, 50, 70) * kDeg, uniform(rng, -5, 5) * kDeg, 700.0};
  sc.cur = {sc.prev.pitch + uniform(rng, -0.5, 0.5) * kDeg, sc.prev.roll + uniform(rng, -0.5, 0.5) * kDeg, 700.0};
  const double travel = uniform(rng, 50, 300), heading = uniform(rng, -20, 20) * kDeg;
  sc.motion = {travel * std::sin(heading), travel * std::cos(heading), uniform(rng, -2, 2) * kDeg};
  return sc;
}

double max_abs_param_error(const ParamVector& a, const ParamVector& b) {
  const auto x = a.to_array(), y = b.to_array();
  double worst = 0.0;
  for (int k = 0; k < 7; ++k) worst = std::max(worst, std::abs(x[k] - y[k]) / (k == 4 || k == 5 ? 700.0 : 1.0));
  return worst;
}

}  // namespace

TEST_CASE("image-plane chain matches the oracle") {
  const Scenario sc = oracle_scenario();
  const auto pts = grid3();
  const DisplacementField field = exact_field(sc, pts, Plane::Image);
  REQUIRE(field.entries.size() == 9);
  for (std::size_t i = 0; i < 9; ++i) {
    CHECK(std::abs(field.entries[i].d.dx - kImageField[i][0]) < 1e-9);
    CHECK(std::abs(field.entries[i].d.dy - kImageField[i][1]) < 1e-9);
    const auto r = residual_image(field.entries[i], sc.truth(), 700.0, K);
    REQUIRE(r);
    CHECK(std::abs((*r)[0]) < 1e-9);
    CHECK(std::abs((*r)[1]) < 1e-9);
  }
}

TEST_CASE("longitudinal perturbation residuals") {
  const Scenario sc = oracle_scenario();
  const DisplacementField field = exact_field(sc, grid3(), Plane::Image);
  ParamVector bumped = sc.truth();
  bumped.tz += 10.0;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < 9; ++i) {
    const auto r = residual_image(field.entries[i], bumped, 700.0, K);
    REQUIRE(r);
    CHECK(std::abs((*r)[0] - kBumpedResidual[i][0]) < 1e-9);
    CHECK(std::abs((*r)[1] - kBumpedResidual[i][1]) < 1e-9);
    mx += (*r)[0] / 9;
    my += (*r)[1] / 9;
  }
  CHECK(std::abs(mx - 0.02960048555250457) < 1e-9);
  CHECK(std::abs(my - 7.522996771783347) < 1e-9);
}

TEST_CASE("IPM chain matches the oracle") {
  const Scenario sc = oracle_scenario();
  const IpmPair planes = oracle_planes();
  const DisplacementField field = exact_field(sc, grid3(), Plane::Ipm, planes);
  REQUIRE(field.entries.size() == 9);
  for (std::size_t i = 0; i < 9; ++i) {
    const FieldEntry& e = field.entries[i];
    CHECK(e.anchor.u == kIpmField[i][0]);
    CHECK(e.anchor.v == kIpmField[i][1]);
    CHECK(std::abs(e.d.dx - kIpmField[i][2]) < 1e-7);
    CHECK(std::abs(e.d.dy - kIpmField[i][3]) < 1e-7);
    const auto r = residual_ipm(e, sc.truth(), 700.0, planes, K);
    REQUIRE(r);
    CHECK(std::hypot((*r)[0], (*r)[1]) < 1e-9);
  }
}

TEST_CASE("residuals vanish at the truth in both planes") {
  std::mt19937_64 rng(17);
  for (int n = 0; n < 50; ++n) {
    const Scenario sc = random_scenario(rng);
    const auto pts = grid99();
    for (const Plane plane : {Plane::Image, Plane::Ipm}) {
      std::optional<IpmPair> planes;
      if (plane == Plane::Ipm) {
        ParamVector est = sc.truth();
        est.pitch_prev += uniform(rng, -1, 1) * kDeg;
        est.pitch_cur += uniform(rng, -1, 1) * kDeg;
        est.roll_cur += uniform(rng, -1, 1) * kDeg;
        planes = IpmPair{plan_ipm(pts, est.prev_pose(700), K, 2.0), plan_ipm(pts, est.cur_pose(700), K, 2.0)};
      }
      const DisplacementField field = exact_field(sc, pts, plane, planes);
      REQUIRE(field.entries.size() > 80);
      const auto cost = field_cost(field, sc.truth(), 700.0, K);
      REQUIRE(cost);
      CHECK(*cost < 1e-16 * static_cast<double>(field.entries.size()));
    }
  }
}

TEST_CASE("a one degree pitch error shows up almost everywhere") {
  std::mt19937_64 rng(23);
  for (int n = 0; n < 20; ++n) {
    const Scenario sc = random_scenario(rng);
    const DisplacementField field = exact_field(sc, grid99(), Plane::Image);
    ParamVector wrong = sc.truth();
    wrong.pitch_cur += kDeg;
    std::size_t visible = 0;
    for (const auto& e : field.entries) {
      const auto r = residual_image(e, wrong, 700.0, K);
      if (r && std::hypot((*r)[0], (*r)[1]) > 1.0) ++visible;
    }
    CHECK(static_cast<double>(visible) >= 0.95 * static_cast<double>(field.entries.size()));
  }
}

TEST_CASE("analytic Jacobians agree with finite differences") {
  std::mt19937_64 rng(29);
  const double step = 1e-6;
  for (int n = 0; n < 100; ++n) {
    const Scenario sc = random_scenario(rng);
    const auto pts = grid99();
    const IpmPair planes{plan_ipm(pts, sc.prev, K, 2.0), plan_ipm(pts, sc.cur, K, 2.0)};
    for (const Plane plane : {Plane::Image, Plane::Ipm}) {
      const DisplacementField field =
          exact_field(sc, pts, plane, plane == Plane::Ipm ? std::optional<IpmPair>(planes) : std::nullopt);
      ParamVector at = sc.truth();
      at.tz += uniform(rng, -20, 20);
      at.roll_prev += uniform(rng, -1, 1) * kDeg;
      for (std::size_t i = 0; i < field.entries.size(); i += 7) {
        const auto lin = linearize(field, field.entries[i], at, 700.0, K);
        REQUIRE(lin);
        for (int k = 0; k < 7; ++k) {
          auto hi = at.to_array(), lo = at.to_array();
          hi[k] += step;
          lo[k] -= step;
          auto pred = [&](const std::array<double, 7>& p) {
            return field.plane == Plane::Image
                       ? residual_image(field.entries[i], ParamVector::from_array(p), 700.0, K)
                       : residual_ipm(field.entries[i], ParamVector::from_array(p), 700.0, planes, K);
          };
          const auto rh = pred(hi), rl = pred(lo);
          REQUIRE(rh);
          REQUIRE(rl);
          for (int c = 0; c < 2; ++c) {
            const double fd = ((*rh)[c] - (*rl)[c]) / (2 * step);
            CHECK(std::abs(lin->J[c][k] - fd) <= 1e-4 * std::max(1.0, std::abs(fd)));
          }
        }
      }
    }
  }
}

TEST_CASE("LM recovers exact fields from the default start") {
  std::mt19937_64 rng(31);
  for (int n = 0; n < 25; ++n) {
    const Scenario sc = random_scenario(rng);
    const DisplacementField field = exact_field(sc, grid99(), Plane::Image);
    const LmResult lm = solve_lm(field, ParamVector::initial(), 700.0, K);
    CHECK(lm.status == LmStatus::Converged);
    CHECK(max_abs_param_error(lm.params, sc.truth()) < 1e-6);
    CHECK(lm.cost < 1e-12);
    CHECK(lm.cost <= lm.initial_cost);
    for (std::size_t i = 1; i < lm.accepted_costs.size(); ++i)
      CHECK(lm.accepted_costs[i] <= lm.accepted_costs[i - 1]);
    if (!lm.accepted_costs.empty()) {
      CHECK(lm.accepted_costs.front() <= lm.initial_cost);
      CHECK(lm.accepted_costs.back() == lm.cost);
    }
  }
}

TEST_CASE("LM needs four entries") {
  const Scenario sc = oracle_scenario();
  DisplacementField field = exact_field(sc, grid3(), Plane::Image);
  for (std::size_t i = 3; i < field.entries.size(); ++i) field.entries[i].inlier = false;
  CHECK_THROWS_AS(solve_lm(field, ParamVector::initial(), 700.0, K), InsufficientInliers);
  field.entries[3].inlier = true;
  CHECK_NOTHROW(solve_lm(field, ParamVector::initial(), 700.0, K));
  field.entries[3].valid = false;
  CHECK_THROWS_AS(solve_lm(field, ParamVector::initial(), 700.0, K), InsufficientInliers);
}

TEST_CASE("cost along a single axis has one minimum at the truth") {
  std::mt19937_64 rng(37);
  for (int n = 0; n < 10; ++n) {
    const Scenario sc = random_scenario(rng);
    const DisplacementField field = exact_field(sc, grid99(), Plane::Image);
    for (int axis = 0; axis < 7; ++axis) {
      const double span = axis == 4 || axis == 5 ? 50.0 : 10.0 * kDeg;
      std::vector<double> costs;
      for (int s = -20; s <= 20; ++s) {
        auto p = sc.truth().to_array();
        p[axis] += span * s / 20.0;
        const auto c = field_cost(field, ParamVector::from_array(p), 700.0, K);
        REQUIRE(c);
        costs.push_back(*c);
      }
      const auto argmin = std::min_element(costs.begin(), costs.end()) - costs.begin();
      CHECK(argmin == 20);
      for (std::size_t i = 1; i <= 20; ++i) CHECK(costs[i] < costs[i - 1]);
      for (std::size_t i = 21; i < costs.size(); ++i) CHECK(costs[i] > costs[i - 1]);
    }
  }
}

namespace {

DisplacementField noisy(const DisplacementField& clean, double sigma, std::uint64_t seed) {
  DisplacementField f = clean;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  for (auto& e : f.entries) {
    e.d.dx += noise(rng);
    e.d.dy += noise(rng);
    e.d.confidence = 0.5;
  }
  return f;
}

// Replaces a fraction of the entries by vectors of 10x the median magnitude.
DisplacementField with_outliers(const DisplacementField& clean, double fraction, std::uint64_t seed) {
  DisplacementField f = clean;
  std::vector<double> mags;
  for (const auto& e : f.entries) mags.push_back(std::hypot(e.d.dx, e.d.dy));
  std::nth_element(mags.begin(), mags.begin() + mags.size() / 2, mags.end());
  const double gross = 10.0 * mags[mags.size() / 2];
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(f.entries.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  const auto count = static_cast<std::size_t>(fraction * static_cast<double>(f.entries.size()));
  for (std::size_t i = 0; i < count; ++i) {
    const double angle = uniform(rng, 0, 2 * std::numbers::pi);
    f.entries[order[i]].d.dx = gross * std::cos(angle);
    f.entries[order[i]].d.dy = gross * std::sin(angle);
  }
  return f;
}

struct Errors {
  double pitch, roll, dist;
};

Errors errors_of(const ParamVector& p, const Scenario& sc) {
  return {std::max(std::abs(p.pitch_prev - sc.prev.pitch), std::abs(p.pitch_cur - sc.cur.pitch)) / kDeg,
          std::max(std::abs(p.roll_prev - sc.prev.roll), std::abs(p.roll_cur - sc.cur.roll)) / kDeg,
          std::hypot(p.tx - sc.motion.tx, p.tz - sc.motion.tz)};
}

}  // namespace

TEST_CASE("robust estimation tolerates a fifth of gross outliers") {
  std::mt19937_64 rng(41);
  Errors clean_sum{0, 0, 0}, dirty_sum{0, 0, 0};
  for (int n = 0; n < 10; ++n) {
    const Scenario sc = random_scenario(rng);
    const DisplacementField clean = noisy(exact_field(sc, grid99(), Plane::Image), 0.2, 200 + n);
    const DisplacementField dirty = with_outliers(clean, 0.2, 100 + n);
    RobustOptions opt;
    opt.seed = static_cast<std::uint64_t>(n);
    const StageResult rc = robust_estimate(clean, ParamVector::initial(), 700.0, K, opt);
    const StageResult rd = robust_estimate(dirty, ParamVector::initial(), 700.0, K, opt);
    CHECK(rd.inliers <= clean.entries.size() - clean.entries.size() / 5);
    const Errors ec = errors_of(rc.params, sc), ed = errors_of(rd.params, sc);
    clean_sum = {clean_sum.pitch + ec.pitch, clean_sum.roll + ec.roll, clean_sum.dist + ec.dist};
    dirty_sum = {dirty_sum.pitch + ed.pitch, dirty_sum.roll + ed.roll, dirty_sum.dist + ed.dist};
  }
  CHECK(dirty_sum.pitch <= 2.0 * clean_sum.pitch);
  CHECK(dirty_sum.roll <= 2.0 * clean_sum.roll);
  CHECK(dirty_sum.dist <= 2.0 * clean_sum.dist);
}

TEST_CASE("a single full subset is plain LM") {
  const Scenario sc = oracle_scenario();
  const DisplacementField field = noisy(exact_field(sc, grid99(), Plane::Image), 0.1, 1);
  RobustOptions opt;
  opt.subsets = 1;
  opt.ratio = 1.0;
  opt.magnitude_factor = 1e9;
  const StageResult r = robust_estimate(field, ParamVector::initial(), 700.0, K, opt);
  const LmResult lm = solve_lm(field, ParamVector::initial(), 700.0, K, opt.lm);
  CHECK(r.params == lm.params);
  CHECK(r.cost == lm.cost);
  CHECK(r.inliers == field.entries.size());
}

TEST_CASE("robust estimation is deterministic and exec-independent") {
  std::mt19937_64 rng(43);
  const Scenario sc = random_scenario(rng);
  const DisplacementField field = with_outliers(noisy(exact_field(sc, grid99(), Plane::Image), 0.2, 3), 0.2, 7);
  RobustOptions opt;
  opt.seed = 99;
  opt.exec = Exec::Parallel;
  const StageResult a = robust_estimate(field, ParamVector::initial(), 700.0, K, opt);
  const StageResult b = robust_estimate(field, ParamVector::initial(), 700.0, K, opt);
  opt.exec = Exec::Serial;
  const StageResult c = robust_estimate(field, ParamVector::initial(), 700.0, K, opt);
  CHECK(a.params == b.params);
  CHECK(a.params == c.params);
  CHECK(a.candidate_costs == c.candidate_costs);
  REQUIRE(a.candidate_costs.size() == 50);
  for (double cost : a.candidate_costs) CHECK(a.cost <= cost);
  const auto first_best = std::min_element(a.candidate_costs.begin(), a.candidate_costs.end());
  CHECK(*first_best == a.cost);
}

TEST_CASE("robust estimation validates its options") {
  const DisplacementField field = exact_field(oracle_scenario(), grid3(), Plane::Image);
  RobustOptions opt;
  opt.subsets = 0;
  CHECK_THROWS_AS(robust_estimate(field, ParamVector::initial(), 700.0, K, opt), std::invalid_argument);
  opt.subsets = 5;
  opt.ratio = 0.0;
  CHECK_THROWS_AS(robust_estimate(field, ParamVector::initial(), 700.0, K, opt), std::invalid_argument);
  opt.ratio = 0.3;  // three of nine
  CHECK_THROWS_AS(robust_estimate(field, ParamVector::initial(), 700.0, K, opt), InsufficientInliers);
}

TEST_CASE("magnitude and confidence rejection") {
  DisplacementField f;
  for (double m : {1.0, 1.2, 0.9, 1.1, 1.0, 9.0, 3.7, 2.9}) {
    FieldEntry e;
    e.d = {m, 0.0, 0.5};
    f.entries.push_back(e);
  }
  f.entries[4].d.confidence = 0.05;
  f.entries[3].valid = false;
  reject_by_magnitude(f, 3.0, 2.0, 0.1);
  // median of the valid magnitudes is 1.2, limit max(3.6, 2.0)
  const bool expected[] = {true, true, true, true, false, false, false, true};
  for (std::size_t i = 0; i < f.entries.size(); ++i) CHECK(f.entries[i].inlier == expected[i]);

  DisplacementField small;
  for (double m : {0.1, 0.1, 0.1, 1.9}) {
    FieldEntry e;
    e.d = {0.0, m, 1.0};
    small.entries.push_back(e);
  }
  reject_by_magnitude(small, 3.0, 2.0, 0.1);
  for (const auto& e : small.entries) CHECK(e.inlier);
}

TEST_CASE("prediction rejection") {
  DisplacementField f;
  for (double dev : {0.2, 0.1, 0.3, 0.2, 4.0, 1.4}) {
    FieldEntry e;
    e.d = {10.0 + dev, 5.0, 1.0};
    e.predicted = ImagePoint{10.0, 5.0};
    f.entries.push_back(e);
  }
  f.entries.push_back(FieldEntry{});
  reject_by_prediction(f, 3.0, 1.5);
  const bool expected[] = {true, true, true, true, false, true, false};
  for (std::size_t i = 0; i < f.entries.size(); ++i) CHECK(f.entries[i].inlier == expected[i]);
}
