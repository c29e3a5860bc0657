#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>

#include "modarith/mpnat.hpp"

namespace modarith {

/// Split parameter profile of the truncated low-half product for a
/// multiplier of complexity O(n^alpha).
struct RhoProfile {
  double alpha = 2.0;
  double rho_hat = 0.5;
  double c_rho = 0.5;
};

/// Cost factor C_rho = rho^alpha / (1 - 2 (1 - rho)^alpha) of the low-half
/// product relative to a full product, for alpha in ]1, 2], rho in [0.5, 1].
double c_rho(double alpha, double rho);

/// Closed-form minimiser rho_hat = 1 - 2^(-1/(alpha-1)) and its C_rho.
/// Throws ContractViolation unless 1 < alpha <= 2.
RhoProfile optimal_rho(double alpha);

/// Default split for low products whose full sub-products use `kind`.
double default_rho(MulKind kind) noexcept;

namespace mpn {

/// r = a * b mod B^L with L = r.size() = a.size() = b.size().
/// One full product P0 of the low ceil(rho L) limbs, plus two recursive low
/// products P1, P2 of the cross terms added at limb offset ceil(rho L).
template <LimbWord Limb>
void mul_low_n(std::span<Limb> r, std::span<const Limb> a, std::span<const Limb> b, double rho,
               const MulConfig& cfg, MulCounter* counter) {
  const std::size_t len = r.size();
  if (len == 0) return;
  if (len < 2) {
    r[0] = mul_lo<Limb>(a[0], b[0]);
    if (counter) counter->submuls += 1;
    return;
  }
  std::size_t split = static_cast<std::size_t>(std::ceil(rho * static_cast<double>(len) - 1e-9));
  split = std::clamp(split, (len + 1) / 2, len);

  // rho = 1/2 over schoolbook leaves unrolls to the triangle of len(len+1)/2
  // limb products; run it as one loop
  if (cfg.kind == MulKind::schoolbook && split == (len + 1) / 2) {
    zero(r);
    for (std::size_t j = 0; j < len; ++j) addmul_1<Limb>(r.subspan(j), a.first(len - j), b[j]);
    if (counter) counter->submuls += len * (len + 1) / 2;
    return;
  }

  Scratch<Limb> full;
  mul_full_n<Limb>(std::span<Limb>(full.data(), 2 * split), a.first(split), b.first(split), cfg, counter);
  std::copy_n(full.begin(), len, r.begin());
  if (split == len) return;

  const std::size_t rest = len - split;
  Scratch<Limb> part;
  const std::span<Limb> p(part.data(), rest);
  mul_low_n<Limb>(p, a.subspan(split, rest), b.first(rest), rho, cfg, counter);
  add_n<Limb>(r.subspan(split), r.subspan(split), p);
  mul_low_n<Limb>(p, a.first(rest), b.subspan(split, rest), rho, cfg, counter);
  add_n<Limb>(r.subspan(split), r.subspan(split), p);
}

}  // namespace mpn

/// (a * b) mod 2^out_bits. Requires out_bits <= width and 0.5 <= rho <= 1.
template <LimbWord Limb, std::size_t N>
FixedNat<Limb, N> mul_low(const FixedNat<Limb, N>& a, const FixedNat<Limb, N>& b, std::size_t out_bits,
                          double rho, MulCounter* counter = nullptr, const MulConfig& cfg = {}) {
  static_assert(N <= kMaxLimbs);
  if (!(rho >= 0.5 && rho <= 1.0)) throw ContractViolation("mul_low: rho must lie in [0.5, 1]");
  if (out_bits > FixedNat<Limb, N>::width_bits) throw ContractViolation("mul_low: out_bits exceeds operand width");
  FixedNat<Limb, N> r;
  const std::size_t len = (out_bits + limb_bits<Limb> - 1) / limb_bits<Limb>;
  mpn::mul_low_n<Limb>(r.limbs().first(len), a.limbs().first(len), b.limbs().first(len), rho, cfg, counter);
  return r.low_bits(out_bits);
}

}  // namespace modarith
