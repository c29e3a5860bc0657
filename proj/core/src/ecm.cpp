#include "modarith/ecm.hpp"

#include <random>

namespace modarith {

PrimePowerPlan stage1_plan(std::uint64_t b1) {
  if (b1 < 2) throw ConfigError("B1 must be at least 2");
  if (b1 > (std::uint64_t{1} << 32)) throw ConfigError("B1 above 2^32 is not supported");
  PrimePowerPlan plan;
  plan.b1 = b1;
  std::vector<bool> composite(b1 + 1, false);
  // exact bit length of k: keep k as base-2^32 digits
  std::vector<std::uint32_t> k{1};
  for (std::uint64_t p = 2; p <= b1; ++p) {
    if (composite[p]) continue;
    for (std::uint64_t j = p * p; j <= b1; j += p) composite[j] = true;
    std::uint64_t q = p;
    while (q <= b1 / p) q *= p;
    plan.factors.push_back(q);
    std::uint64_t carry = 0;
    for (std::uint32_t& d : k) {
      const std::uint64_t t = std::uint64_t{d} * q + carry;
      d = static_cast<std::uint32_t>(t);
      carry = t >> 32;
    }
    while (carry != 0) {
      k.push_back(static_cast<std::uint32_t>(carry));
      carry >>= 32;
    }
  }
  plan.k_bitlen = (k.size() - 1) * 32 + static_cast<std::size_t>(std::bit_width(k.back()));
  return plan;
}

std::string_view to_string(Outcome o) noexcept {
  switch (o) {
    case Outcome::factor_found:
      return "factor_found";
    case Outcome::no_factor:
      return "no_factor";
    case Outcome::trivial_gcd_n:
      return "trivial_gcd_n";
  }
  return "?";
}

std::vector<std::uint64_t> sigma_sequence(std::uint64_t seed, std::size_t count) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint64_t> out(count);
  for (auto& s : out) s = 6 + rng() % ((std::uint64_t{1} << 32) - 6);
  return out;
}

}  // namespace modarith
