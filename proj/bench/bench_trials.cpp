// Serial vs OpenMP trial execution, plus the block validator on its own.

#include <benchmark/benchmark.h>

#include <vector>

#include "blockcalc/experiment.hpp"
#include "blockcalc/simulator.hpp"

namespace {

blockcalc::SimConfig bench_config(std::size_t bs) {
  blockcalc::ExperimentParams params;
  params.bs = bs;
  params.ops = 10000;
  return blockcalc::case_sim_config(blockcalc::ExperimentKind::Case2ReadWrite, params);
}

void BM_TrialsSerial(benchmark::State& state) {
  const auto config = bench_config(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(blockcalc::trial_rates_serial(config, 50));
  }
}

void BM_TrialsParallel(benchmark::State& state) {
  const auto config = bench_config(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(blockcalc::trial_rates(config, 50));
  }
}

void BM_ValidateBlock(benchmark::State& state) {
  const auto bs = static_cast<std::size_t>(state.range(0));
  blockcalc::RandomStream rng(7);
  std::vector<blockcalc::Transaction> block(bs);
  for (std::size_t i = 0; i < bs; ++i) {
    block[i] = {static_cast<std::uint32_t>(i), rng.uniform() < 0.5 ? blockcalc::OpType::Read : blockcalc::OpType::Write,
                static_cast<blockcalc::Key>(1 + rng.below(100))};
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(blockcalc::validate_block(block));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(bs));
}

}  // namespace

BENCHMARK(BM_TrialsSerial)->Arg(8)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrialsParallel)->Arg(8)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ValidateBlock)->Arg(8)->Arg(64)->Arg(512);

BENCHMARK_MAIN();
