#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "modarith/truncmul.hpp"

using namespace modarith;

namespace {

template <std::size_t N, MulKind Kind>
void BM_full(benchmark::State& state) {
  std::mt19937_64 rng(N);
  const auto a = bench::random_nat<N>(rng), b = bench::random_nat<N>(rng);
  const MulConfig cfg{Kind};
  for (auto _ : state) benchmark::DoNotOptimize(mul_full(a, b, cfg));
}

// low half at the kind's default split against the full product
template <std::size_t N, MulKind Kind>
void BM_low(benchmark::State& state) {
  std::mt19937_64 rng(N + 1);
  const auto a = bench::random_nat<N>(rng), b = bench::random_nat<N>(rng);
  const MulConfig cfg{Kind};
  for (auto _ : state) {
    benchmark::DoNotOptimize(mul_low(a, b, FixedNat<std::uint64_t, N>::width_bits, default_rho(Kind), nullptr, cfg));
  }
}

}  // namespace

BENCHMARK(BM_full<4, MulKind::schoolbook>);
BENCHMARK(BM_full<16, MulKind::schoolbook>);
BENCHMARK(BM_full<16, MulKind::karatsuba>);
BENCHMARK(BM_full<64, MulKind::schoolbook>);
BENCHMARK(BM_full<64, MulKind::karatsuba>);
BENCHMARK(BM_full<64, MulKind::toom3>);
BENCHMARK(BM_low<4, MulKind::schoolbook>);
BENCHMARK(BM_low<16, MulKind::schoolbook>);
BENCHMARK(BM_low<64, MulKind::schoolbook>);
BENCHMARK(BM_low<64, MulKind::karatsuba>);

BENCHMARK_MAIN();
