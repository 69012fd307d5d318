#include <benchmark/benchmark.h>

#include <random>

#include "softbot/evolution.hpp"
#include "softbot/fitness.hpp"
#include "softbot/physics.hpp"

using namespace softbot;

static void BM_Step(benchmark::State& state) {
  const SimConfig config;
  std::mt19937_64 rng(1);
  const Genome g = random_genome(Mode::EvoDevo, rng);
  const VoxelLengths rest = voxel_rest_lengths(g, 0.0, config.duration);
  PhysicsState s = build_lattice(rest, config);
  for (auto _ : state) {
    step_in_place(s, rest, config);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Step);

static void BM_Evaluate(benchmark::State& state) {
  SimConfig config;
  config.duration = static_cast<double>(state.range(0));
  std::mt19937_64 rng(2);
  const Genome g = random_genome(Mode::EvoDevo, rng);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(g, config).fitness);
}
BENCHMARK(BM_Evaluate)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_Selection(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> fit(0.0, 1.0);
  std::vector<Individual> pool(61);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    pool[i].id = static_cast<std::int64_t>(i);
    pool[i].fitness = fit(rng);
    pool[i].age = static_cast<int>(rng() % 20);
  }
  for (auto _ : state) benchmark::DoNotOptimize(select_survivors(pool, 30));
}
BENCHMARK(BM_Selection);
BENCHMARK_MAIN();
