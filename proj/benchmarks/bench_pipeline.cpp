#include <benchmark/benchmark.h>

#include "landing/imaging.hpp"
#include "landing/plz.hpp"
#include "landing/sim.hpp"

using landing::imaging::canny_edges;
using landing::imaging::to_grayscale;

using namespace landing;

namespace {

sim::Scenario cluttered() {
  sim::Scenario s;
  s.drone.altitude_m = 15.0;
  for (int i = 0; i < 6; ++i) {
    const double x = -8.0 + 3.5 * i;
    const double y = (i % 2 ? 2.0 : -4.0);
    sim::Obstacle o;
    o.footprint_m = {{x, y}, {x + 2.0, y}, {x + 2.0, y + 1.5}, {x, y + 1.5}};
    o.height_m = 3.0;
    s.obstacles.push_back(o);
  }
  return s;
}

void BM_RenderFrame(benchmark::State& state) {
  const auto s = cluttered();
  const auto w = sim::initial_state(s);
  for (auto _ : state) benchmark::DoNotOptimize(sim::render_frame(s, w));
}
BENCHMARK(BM_RenderFrame)->Unit(benchmark::kMillisecond);

void BM_Canny(benchmark::State& state) {
  const auto s = cluttered();
  const Frame gray = to_grayscale(sim::render_frame(s, sim::initial_state(s)));
  for (auto _ : state) benchmark::DoNotOptimize(canny_edges(gray));
}
BENCHMARK(BM_Canny)->Unit(benchmark::kMillisecond);

void BM_DetectPlz(benchmark::State& state) {
  const auto s = cluttered();
  const auto w = sim::initial_state(s);
  const EdgeMap edges = canny_edges(to_grayscale(sim::render_frame(s, w)));
  const CameraModel cam = sim::color_camera(s, w);
  for (auto _ : state) benchmark::DoNotOptimize(plz::detect_plz(edges, cam));
}
BENCHMARK(BM_DetectPlz)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
