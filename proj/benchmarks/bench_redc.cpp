#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "modarith/modred.hpp"

using namespace modarith;

namespace {

template <std::size_t N, RedcStrategy S>
void BM_redc(benchmark::State& state) {
  std::mt19937_64 rng(N);
  const auto ctx = mont_setup(bench::random_modulus<N>(rng));
  // a product of two residues below m
  const auto x = bench::random_nat<N>(rng), y = bench::random_nat<N>(rng);
  const auto a = mul_schoolbook(div_rem(x, ctx.modulus()).remainder, div_rem(y, ctx.modulus()).remainder);
  for (auto _ : state) benchmark::DoNotOptimize(redc(ctx, a, S));
}

template <std::size_t N>
void BM_barrett(benchmark::State& state) {
  std::mt19937_64 rng(N + 7);
  const auto m = bench::random_modulus<N>(rng);
  const auto ctx = BarrettCtx<std::uint64_t, N>::setup(m);
  const auto a = mul_schoolbook(div_rem(bench::random_nat<N>(rng), m).remainder,
                                div_rem(bench::random_nat<N>(rng), m).remainder);
  for (auto _ : state) benchmark::DoNotOptimize(ctx.reduce(a));
}

}  // namespace

BENCHMARK(BM_redc<4, RedcStrategy::classic>);
BENCHMARK(BM_redc<4, RedcStrategy::opt_schoolbook>);
BENCHMARK(BM_redc<4, RedcStrategy::opt_split_k2>);
BENCHMARK(BM_redc<6, RedcStrategy::opt_split_k3>);
BENCHMARK(BM_redc<6, RedcStrategy::classic>);
BENCHMARK(BM_redc<16, RedcStrategy::classic>);
BENCHMARK(BM_redc<16, RedcStrategy::opt_schoolbook>);
BENCHMARK(BM_redc<16, RedcStrategy::opt_split_k2>);
BENCHMARK(BM_redc<64, RedcStrategy::classic>);
BENCHMARK(BM_redc<64, RedcStrategy::opt_schoolbook>);
BENCHMARK(BM_redc<64, RedcStrategy::opt_split_k2>);
BENCHMARK(BM_redc<63, RedcStrategy::opt_split_k3>);
BENCHMARK(BM_redc<63, RedcStrategy::classic>);
BENCHMARK(BM_barrett<4>);
BENCHMARK(BM_barrett<16>);

BENCHMARK_MAIN();
