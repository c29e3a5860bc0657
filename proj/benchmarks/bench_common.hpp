#pragma once

#include <random>

#include "modarith/mpnat.hpp"

namespace modarith::bench {

template <std::size_t N>
FixedNat<std::uint64_t, N> random_nat(std::mt19937_64& rng) {
  FixedNat<std::uint64_t, N> r;
  for (std::size_t i = 0; i < N; ++i) r.limb(i) = rng();
  return r;
}

/// Odd, two bits below the full width.
template <std::size_t N>
FixedNat<std::uint64_t, N> random_modulus(std::mt19937_64& rng) {
  auto m = random_nat<N>(rng);
  m.limb(N - 1) = (m.limb(N - 1) >> 2) | (std::uint64_t{1} << 61);
  m.limb(0) |= 1u;
  return m;
}

}  // namespace modarith::bench
