// Serial loop vs OpenMP loop for each batch kernel. Arg 0 is serial, 1 parallel.
#include <benchmark/benchmark.h>

#include "blossom/parallel.hpp"

using namespace blossom;

namespace {

Exec exec_of(const benchmark::State& s) { return s.range(0) == 0 ? Exec::serial : Exec::parallel; }

void BM_tally_trees(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(tally_trees(3, 200, 2000, 1, TreeSampler::cycle, exec_of(s)));
}

void BM_tally_balls(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(tally_balls(3, 1000, 2, 2000, 1, TreeSampler::cycle, exec_of(s)));
}

void BM_walk_tally(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(walk_tally(3, 50, 5000, 1, GraftMode::sized, exec_of(s)));
}

void BM_close_ball_batch(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(close_ball_batch(3, 3, 0, 200, CloseBallOptions{}, exec_of(s)));
}

}  // namespace

BENCHMARK(BM_tally_trees)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_tally_balls)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_walk_tally)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_close_ball_batch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
