// Serial reference vs OpenMP path of the data-parallel kernels.
// Arg 0 = serial, 1 = parallel.

#include <benchmark/benchmark.h>

#include "groundpose/flow.hpp"
#include "groundpose/ipm.hpp"
#include "groundpose/patch_grid.hpp"
#include "groundpose/synth.hpp"

namespace {

using namespace groundpose;

Exec exec_of(const benchmark::State& state) { return state.range(0) == 0 ? Exec::Serial : Exec::Parallel; }

Scenario scene() {
  Scenario sc;
  sc.prev = {1.1, 0.03, 700.0};
  sc.cur = {1.105, 0.025, 700.0};
  sc.motion = {15.0, 150.0, 0.01};
  sc.noise_sigma = 0.01;
  return sc;
}

const std::pair<ImageBuffer, ImageBuffer>& frames() {
  static const auto f = render(scene());
  return f;
}

void BM_RenderFrame(benchmark::State& state) {
  const Scenario sc = scene();
  for (auto _ : state) {
    auto img = render_frame(sc.texture, sc.prev, MotionParams{}, sc.K, sc.noise_sigma, 1, 0, sc.supersample,
                            exec_of(state));
    benchmark::DoNotOptimize(img);
  }
}
BENCHMARK(BM_RenderFrame)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_WarpToIpm(benchmark::State& state) {
  const Scenario sc = scene();
  const IpmPlaneSpec spec = plan_ipm(make_grid(sc.K, 9, 11, 64.0).points, sc.prev, sc.K, 2.0);
  frames();
  for (auto _ : state) {
    auto w = warp_to_ipm(frames().first, spec, sc.K, exec_of(state));
    benchmark::DoNotOptimize(w);
  }
}
BENCHMARK(BM_WarpToIpm)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_RegisterPatches(benchmark::State& state) {
  const Scenario sc = scene();
  const auto pts = make_grid(sc.K, 9, 11, 64.0).points;
  const auto truth = exact_field(sc, pts, Plane::Image);
  std::vector<ImagePoint> anchors, offsets;
  for (const auto& e : truth.entries) {
    anchors.push_back(e.anchor);
    offsets.push_back({e.d.dx, e.d.dy});
  }
  FlowOptions opt;
  opt.exec = exec_of(state);
  frames();
  for (auto _ : state) {
    auto f = register_patches(frames().first, nullptr, frames().second, nullptr, anchors, offsets, opt);
    benchmark::DoNotOptimize(f);
  }
}
BENCHMARK(BM_RegisterPatches)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_RobustEstimate(benchmark::State& state) {
  const Scenario sc = scene();
  DisplacementField field = exact_field(sc, make_grid(sc.K, 9, 11, 64.0).points, Plane::Image);
  for (std::size_t i = 0; i < field.entries.size(); ++i) {
    field.entries[i].d.dx += hashed_gaussian(3, i, 0) * 0.1;
    field.entries[i].d.dy += hashed_gaussian(3, i, 1) * 0.1;
  }
  RobustOptions opt;
  opt.exec = exec_of(state);
  for (auto _ : state) {
    auto r = robust_estimate(field, ParamVector::initial(), 700.0, sc.K, opt);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_RobustEstimate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
