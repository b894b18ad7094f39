#include <benchmark/benchmark.h>

#include <cmath>

#include "lshr/density.hpp"
#include "lshr/gibbs.hpp"
#include "lshr/hitrun.hpp"
#include "lshr/level_set.hpp"

using namespace lshr;

static void BM_SpikeSlabLogDensity(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const SpikeSlab model(SpikeSlabParams{d, 0.05, 3.0});
  const Vector x = Vector::Constant(d, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(model.log_density(x));
}
BENCHMARK(BM_SpikeSlabLogDensity)->Arg(2)->Arg(20);

static void BM_FindChord(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const SpikeSlab model(SpikeSlabParams{d, 0.05, 3.0});
  const auto pred = lshr1_membership(model, model.max_log_density() + d * std::log(0.01));
  const auto scaler = CovarianceScaler::identity(d);
  Rng rng(1);
  const Vector x = Vector::Zero(d);
  for (auto _ : state) benchmark::DoNotOptimize(find_chord(pred, x, sample_direction(scaler, rng)));
}
BENCHMARK(BM_FindChord)->Arg(2)->Arg(20);

static void BM_HitAndRunStep(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const EquicorrelatedNormal model(MvnParams{d, 0.9});
  const auto pred = lshr1_membership(model, model.max_log_density() - 2.0);
  const auto scaler = CovarianceScaler::identity(d);
  Rng rng(2);
  Vector x = Vector::Zero(d);
  for (auto _ : state) {
    x = sample_uniform_on_chord(find_chord(pred, x, sample_direction(scaler, rng)), rng);
    benchmark::DoNotOptimize(x);
  }
}
BENCHMARK(BM_HitAndRunStep)->Arg(2)->Arg(10);

static void BM_TiltedChordDraw(benchmark::State& state) {
  const Chord chord{Vector::Zero(3), Vector::Ones(3) / std::sqrt(3.0), -1.0, 2.0};
  Rng rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(sample_exp_tilted_on_chord(chord, 4.0, rng));
}
BENCHMARK(BM_TiltedChordDraw);

static void BM_SpikeSlabGibbsStep(benchmark::State& state) {
  const SpikeSlabParams params{static_cast<int>(state.range(0)), 0.05, 3.0};
  Rng rng(4);
  GibbsChainState s;
  s.x = Vector::Zero(params.dimension);
  for (auto _ : state) {
    s = spike_slab_gibbs_step(std::move(s), params, rng);
    benchmark::DoNotOptimize(s.x);
  }
}
BENCHMARK(BM_SpikeSlabGibbsStep)->Arg(2)->Arg(20);

static void BM_MvnGibbsSweep(benchmark::State& state) {
  const EquicorrelatedNormal model(MvnParams{static_cast<int>(state.range(0)), 0.99});
  Rng rng(5);
  GibbsChainState s;
  s.x = Vector::Zero(model.dimension());
  for (auto _ : state) {
    s = mvn_gibbs_step(std::move(s), model, rng);
    benchmark::DoNotOptimize(s.x);
  }
}
BENCHMARK(BM_MvnGibbsSweep)->Arg(2)->Arg(10);

static void BM_CauchyNormalGibbsStep(benchmark::State& state) {
  const auto params = CauchyNormalParams::make(static_cast<int>(state.range(0)));
  Rng rng(6);
  GibbsChainState s;
  s.x = Vector::Zero(params.dimension);
  for (auto _ : state) {
    s = cauchy_normal_gibbs_step(std::move(s), params, rng);
    benchmark::DoNotOptimize(s.x);
  }
}
BENCHMARK(BM_CauchyNormalGibbsStep)->Arg(2)->Arg(20);

static void BM_Lshr1Run(benchmark::State& state) {
  const SpikeSlab model(SpikeSlabParams{static_cast<int>(state.range(0)), 0.05, 3.0});
  LevelSetOptions options;
  for (auto _ : state) {
    Rng rng(7);
    benchmark::DoNotOptimize(lshr1_run(model, options, rng).levels());
  }
}
BENCHMARK(BM_Lshr1Run)->Arg(2)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
