// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "drpose/augment.hpp"
#include "drpose/experiment.hpp"
#include "drpose/motion.hpp"
#include "drpose/trainer.hpp"

using namespace drpose;

namespace {

struct Fixture {
  std::vector<WorldPose> poses;
  std::vector<Camera> cams;
  NoiseConfig noise;
  AugmentConfig acfg;
  Dataset data;
  Model model;

  Fixture() {
    auto mc = SyntheticMotionConfig::anthropometric();
    mc.num_poses = 2000;
    mc.seed = 5;
    poses = generate_motion(mc);
    cams = PipelineConfig::default_rig();
    noise.gmm = NoiseConfig::default_gmm();
    noise.acc = AccuracyMatrix::uniform(0.9);
    acfg.factor = 2;
    acfg.seed = 6;
    data = augment_dataset_serial(poses, cams, noise, acfg);
    Architecture arch;
    arch.hidden_width = 256;
    model.params = DPNetParams::initialized(arch, 7);
    model.stats = NormStats::fit(data);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_AugmentSerial(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(augment_dataset_serial(f.poses, f.cams, f.noise, f.acfg));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(f.poses.size()) * f.acfg.factor);
}

void BM_AugmentParallel(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(augment_dataset(f.poses, f.cams, f.noise, f.acfg));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(f.poses.size()) * f.acfg.factor);
}

void BM_PredictSerial(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(predict_dataset_serial(f.data, f.model));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(f.data.size()));
}

void BM_PredictParallel(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(predict_dataset(f.data, f.model));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(f.data.size()));
}

}  // namespace

BENCHMARK(BM_AugmentSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AugmentParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PredictSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PredictParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
