// Parallel kernels against their serial reference versions on a 640x480 scene.
// WRINKLE_THREADS controls the OpenMP thread count of the parallel variants.

#include <benchmark/benchmark.h>

#include "support.hpp"
#include "wrinkle/parallel.hpp"
#include "wrinkle/reference.hpp"

using namespace wrinkle;

namespace {

struct Inputs {
  Field height;
  Field smoothed;
  NormalizedImage image;
  ScoreMap scores;
  SvmModel model;
};

const Inputs& inputs() {
  static const Inputs in = [] {
    apply_thread_env();
    Inputs r;
    const SceneSpec spec = scenes::reference();
    const SceneImages s = render_scene(spec);
    r.height = Field(s.height.width(), s.height.height(), s.height.transform().cell_size,
                     s.height.transform().origin);
    for (std::size_t i = 0; i < r.height.size(); ++i) r.height[i] = s.height[i];
    r.smoothed = smooth(r.height, 2.0);
    r.image = normalize(s.light1, s.light2, s.ref1, s.ref2);
    r.model = testing::trained_model();
    r.scores = score_map(r.image, r.model);
    return r;
  }();
  return in;
}

void BM_smooth(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(smooth(inputs().height, 2.0));
}
void BM_smooth_reference(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(reference::smooth(inputs().height, 2.0));
}

void BM_hessian(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(hessian(inputs().smoothed));
}
void BM_hessian_reference(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(reference::hessian(inputs().smoothed));
}

void BM_score_map(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(score_map(inputs().image, inputs().model));
}
void BM_score_map_reference(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(reference::score_map(inputs().image, inputs().model));
}

void BM_hough(benchmark::State& st) {
  const HoughParams hp;
  for (auto _ : st) benchmark::DoNotOptimize(hough_accumulate(inputs().scores.mask, inputs().scores.scores, hp));
}
void BM_hough_reference(benchmark::State& st) {
  const HoughParams hp;
  for (auto _ : st) {
    benchmark::DoNotOptimize(reference::hough_accumulate(inputs().scores.mask, inputs().scores.scores, hp));
  }
}

}  // namespace

BENCHMARK(BM_smooth)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_smooth_reference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_hessian)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_hessian_reference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_score_map)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_score_map_reference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_hough)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_hough_reference)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  inputs();
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
