#include <benchmark/benchmark.h>

#include <cmath>

#include "geoloc/pipeline.hpp"

using namespace geoloc;

namespace {

const Region kRegion{0.0, 4.0, 10.0, 14.0};

void BM_Dragoon(benchmark::State& state) {
  const auto t = make_synthetic_topology(static_cast<int>(state.range(0)), kRegion, 7);
  const int k = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(dragoon(t, k));
}
BENCHMARK(BM_Dragoon)->Args({30, 5})->Args({100, 10})->Args({300, 20})->Unit(benchmark::kMillisecond);

void BM_FitCurve(benchmark::State& state) {
  std::vector<TrainingPair> data;
  const int count = static_cast<int>(state.range(0));
  for (int i = 0; i < count; ++i) {
    const double x = 1.0 + 49.0 * i / (count - 1);
    data.push_back({x, 800.0 * std::log(0.5 * x + 1.0) + 3.0 * std::sin(i), "lm", "t"});
  }
  for (auto _ : state) benchmark::DoNotOptimize(fit_curve(data));
}
BENCHMARK(BM_FitCurve)->Arg(4)->Arg(20)->Arg(100)->Unit(benchmark::kMicrosecond);

void BM_Localize(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const auto t = make_synthetic_topology(60, kRegion, 7);
  const auto landmarks = dragoon(t, k).landmarks;
  DetourProvider provider(1.2);
  NoiseModel noise;
  const auto training = generate_training_set(t, landmarks, noise, provider);
  const auto fit = fit_landmark_curves(landmarks, training);
  const auto frame = plane_frame_for(t, landmarks);
  const GeolocationModel model{landmarks, fit.curves, calibrate_uniform_lc(t, fit.curves, training, frame), frame};
  const auto target = random_targets(1, kRegion, 11).front();
  std::vector<Measurement> ms;
  for (const auto& lm : landmarks.members) ms.push_back(simulate_measurement(t, lm, target, noise, provider));
  LocalizeConfig config;
  config.self_tune = state.range(1) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(locate(t, model, ms, config));
}
BENCHMARK(BM_Localize)->Args({5, 1})->Args({10, 1})->Args({20, 0})->Args({20, 1})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
