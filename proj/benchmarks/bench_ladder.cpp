#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "modarith/ecm.hpp"

using namespace modarith;

namespace {

template <std::size_t N>
void BM_ladder_step(benchmark::State& state, KernelConfig cfg) {
  std::mt19937_64 rng(N);
  const auto ctx = mont_setup(bench::random_modulus<N>(rng));
  const auto setup = curve_from_sigma(ctx, FixedNat<std::uint64_t, N>::from_u64(11), cfg);
  auto r0 = setup.start, r1 = xz_double(setup.curve, setup.start);
  for (auto _ : state) {
    ladder_step(setup.curve, r0, r1, setup.start);
    benchmark::DoNotOptimize(r0);
  }
  state.SetItemsProcessed(state.iterations() * 11);
}

template <std::size_t N>
void BM_stage1(benchmark::State& state, KernelConfig cfg) {
  std::mt19937_64 rng(N + 3);
  const auto ctx = mont_setup(bench::random_modulus<N>(rng));
  const PrimePowerPlan plan = stage1_plan(static_cast<std::uint64_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(stage1(ctx, plan, 11, cfg));
}

constexpr KernelConfig kEager{RedcStrategy::classic, ReductionMode::eager};
constexpr KernelConfig kLazy{RedcStrategy::opt_schoolbook, ReductionMode::lazy};

}  // namespace

void BM_ladder_step_256_eager(benchmark::State& s) { BM_ladder_step<4>(s, kEager); }
void BM_ladder_step_256_lazy(benchmark::State& s) { BM_ladder_step<4>(s, kLazy); }
void BM_ladder_step_512_eager(benchmark::State& s) { BM_ladder_step<8>(s, kEager); }
void BM_ladder_step_512_lazy(benchmark::State& s) { BM_ladder_step<8>(s, kLazy); }
void BM_stage1_256_eager(benchmark::State& s) { BM_stage1<4>(s, kEager); }
void BM_stage1_256_lazy(benchmark::State& s) { BM_stage1<4>(s, kLazy); }

BENCHMARK(BM_ladder_step_256_eager);
BENCHMARK(BM_ladder_step_256_lazy);
BENCHMARK(BM_ladder_step_512_eager);
BENCHMARK(BM_ladder_step_512_lazy);
BENCHMARK(BM_stage1_256_eager)->Arg(2048)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_stage1_256_lazy)->Arg(2048)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
