#include <benchmark/benchmark.h>

#include "qmmw/fixtures.hpp"
#include "qmmw/learning.hpp"
#include "qmmw/random_matrices.hpp"

namespace {

using namespace qmmw;

void BM_Eigh(benchmark::State& state) {
  Rng rng(1);
  const auto h = random_hermitian(rng, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(eigh(h));
}
BENCHMARK(BM_Eigh)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

void BM_Softmax(benchmark::State& state) {
  Rng rng(2);
  const auto y = random_hermitian(rng, static_cast<std::size_t>(state.range(0))) * 10.0;
  for (auto _ : state) benchmark::DoNotOptimize(softmax_density(y));
}
BENCHMARK(BM_Softmax)->Arg(2)->Arg(4)->Arg(8);

void BM_PartialContraction(benchmark::State& state) {
  Rng rng(3);
  const auto game = fixtures::skewed_pennies();
  const Profile x{random_density(rng, 2), random_density(rng, 2)};
  for (auto _ : state) benchmark::DoNotOptimize(gradients(game, x));
}
BENCHMARK(BM_PartialContraction);

void BM_Estimate(benchmark::State& state) {
  const auto kind = static_cast<EstimatorKind>(state.range(0));
  const auto game = fixtures::skewed_pennies();
  const auto geometry = player_geometry(game);
  const auto x = uniform_profile(game);
  Rng rng(4);
  for (auto _ : state) benchmark::DoNotOptimize(estimate(kind, game, x, 0.1, geometry, rng));
}
BENCHMARK(BM_Estimate)
    ->Arg(static_cast<int>(EstimatorKind::kFullInfo))
    ->Arg(static_cast<int>(EstimatorKind::kTwoPoint))
    ->Arg(static_cast<int>(EstimatorKind::kOnePoint));

void BM_RunSteps(benchmark::State& state) {
  const auto kind = static_cast<EstimatorKind>(state.range(0));
  const auto game = fixtures::skewed_pennies();
  RunOptions o;
  o.record_grid = {1000};
  o.record_profiles = false;
  for (auto _ : state) {
    Rng rng(5);
    benchmark::DoNotOptimize(run(game, kind, ConstantSchedule{0.01, 0.1}, 1000, rng, o));
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_RunSteps)
    ->Arg(static_cast<int>(EstimatorKind::kFullInfo))
    ->Arg(static_cast<int>(EstimatorKind::kTwoPoint))
    ->Arg(static_cast<int>(EstimatorKind::kOnePoint));

}  // namespace

BENCHMARK_MAIN();
