#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "cefl/allocator.hpp"
#include "cefl/channel.hpp"
#include "cefl/config.hpp"
#include "cefl/dataset.hpp"
#include "cefl/engine.hpp"
#include "cefl/fedmath.hpp"

namespace {

std::vector<cefl::ChannelRealization> draw_clients(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(10.0, 500.0);
  const cefl::ChannelParams params;
  std::vector<cefl::ChannelRealization> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(cefl::sample_gain(rng, i, dist(rng), params));
  return out;
}

void BM_RequiredBandwidth(benchmark::State& state) {
  const cefl::ResourceBudget budget;
  const cefl::ChannelParams params;
  const double gain = cefl::pathloss(200.0, params);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cefl::required_bandwidth(budget.power_max_w, gain,
                                                      params.noise_psd_w_per_hz, budget.packet_bits,
                                                      budget.deadline_s));
  }
}
BENCHMARK(BM_RequiredBandwidth);

void BM_LinearSearchAllocate(benchmark::State& state) {
  const auto clients = draw_clients(static_cast<std::size_t>(state.range(0)), 11);
  const cefl::ResourceBudget budget;
  const cefl::ChannelParams params;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        cefl::linear_search_allocate(clients, budget, params.noise_psd_w_per_hz));
  }
}
BENCHMARK(BM_LinearSearchAllocate)->Arg(10)->Arg(100)->Arg(1000);

void BM_BruteForceAllocate(benchmark::State& state) {
  const auto clients = draw_clients(static_cast<std::size_t>(state.range(0)), 11);
  const cefl::ResourceBudget budget;
  const cefl::ChannelParams params;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cefl::brute_force_allocate(clients, budget, params.noise_psd_w_per_hz));
  }
}
BENCHMARK(BM_BruteForceAllocate)->Arg(4)->Arg(8);

void BM_LocalGradient(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto task = cefl::synth_dataset(3, 1, d, 200, cefl::LossKind::Logistic, 0.1);
  const cefl::ModelVector w = cefl::ModelVector::Constant(static_cast<Eigen::Index>(d), 0.01);
  const cefl::LossSpec spec{cefl::LossKind::Logistic, 0.1};
  for (auto _ : state) benchmark::DoNotOptimize(cefl::local_gradient(w, task.clients[0], spec));
}
BENCHMARK(BM_LocalGradient)->Arg(20)->Arg(200);

void BM_RunRound(benchmark::State& state) {
  cefl::SimConfig config;
  config.clients = static_cast<std::size_t>(state.range(0));
  config.rounds = 1;
  cefl::Simulation sim(config);
  for (auto _ : state) benchmark::DoNotOptimize(sim.step());
}
BENCHMARK(BM_RunRound)->Arg(10)->Arg(50);

}  // namespace

BENCHMARK_MAIN();
