#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "modarith/errors.hpp"
#include "modarith/modred.hpp"
#include "modarith/mpnat.hpp"

namespace modarith {

/// Maximal prime powers p^e <= b1 for every prime p <= b1, ascending by p.
/// Their product is the stage-1 multiplier k.
struct PrimePowerPlan {
  std::uint64_t b1 = 0;
  std::vector<std::uint64_t> factors;
  std::size_t k_bitlen = 0;
};

/// Throws ConfigError for b1 < 2.
PrimePowerPlan stage1_plan(std::uint64_t b1);

enum class Outcome { factor_found, no_factor, trivial_gcd_n };

std::string_view to_string(Outcome o) noexcept;

template <LimbWord Limb, std::size_t N>
struct XZPoint {
  LazyResidue<Limb, N> x;
  LazyResidue<Limb, N> z;

  friend bool operator==(const XZPoint&, const XZPoint&) = default;
};

/// Montgomery curve B y^2 = x^3 + A x^2 + x over Z/nZ, kept as a24 = (A+2)/4
/// in Montgomery form together with the arithmetic discipline to use.
template <LimbWord Limb, std::size_t N>
struct CurveParams {
  const MontCtx<Limb, N>* ctx = nullptr;
  LazyResidue<Limb, N> a24;
  KernelConfig cfg;
};

template <LimbWord Limb, std::size_t N>
struct StageResult {
  Outcome outcome = Outcome::no_factor;
  FixedNat<Limb, N> factor;  ///< meaningful for factor_found only
  std::uint64_t sigma = 0;
  std::size_t curves_tried = 0;
  MulCounter counters;

  friend bool operator==(const StageResult&, const StageResult&) = default;
};

/// Either x^-1 mod n, or the gcd(x, n) that blocked the inversion.
template <LimbWord Limb, std::size_t N>
struct InverseResult {
  bool ok = false;
  FixedNat<Limb, N> value;
};

/// Binary extended gcd for odd n.
template <LimbWord Limb, std::size_t N>
InverseResult<Limb, N> mod_inverse(const FixedNat<Limb, N>& x, const FixedNat<Limb, N>& n) {
  using Nat = FixedNat<Limb, N>;
  if (!n.is_odd()) throw ContractViolation("mod_inverse: modulus must be odd");
  const Nat xr = div_rem(x, n).remainder;
  const Nat g = gcd(xr, n);
  if (g != Nat::from_u64(1)) return {false, g};
  const Nat one = Nat::from_u64(1);
  auto halve = [&](Nat& c) {
    if (c.is_odd()) {
      const AddResult<Limb, N> s = add(c, n);
      c = s.sum.shr(1);
      if (s.carry) c.limb(N - 1) |= static_cast<Limb>(Limb{1} << (limb_bits<Limb> - 1));
    } else {
      c = c.shr(1);
    }
  };
  auto sub_mod = [&](const Nat& a, const Nat& b) {
    const SubResult<Limb, N> d = sub(a, b);
    return d.borrow ? add(d.diff, n).sum : d.diff;
  };
  Nat u = xr, v = n, x1 = one, x2;
  while (u != one && v != one) {
    while (!u.is_odd()) {
      u = u.shr(1);
      halve(x1);
    }
    while (!v.is_odd()) {
      v = v.shr(1);
      halve(x2);
    }
    if (u >= v) {
      u = sub(u, v).diff;
      x1 = sub_mod(x1, x2);
    } else {
      v = sub(v, u).diff;
      x2 = sub_mod(x2, x1);
    }
  }
  return {true, u == one ? x1 : x2};
}

// ---------------------------------------------------------------------------
// x-only arithmetic

/// Swaps a and b when mask is all ones; both bound tags become the looser one.
template <LimbWord Limb, std::size_t N>
void cswap(XZPoint<Limb, N>& a, XZPoint<Limb, N>& b, Limb mask) noexcept {
  auto swap_nat = [mask](FixedNat<Limb, N>& p, FixedNat<Limb, N>& q) {
    for (std::size_t i = 0; i < N; ++i) {
      const Limb t = static_cast<Limb>((p.limb(i) ^ q.limb(i)) & mask);
      p.limb(i) ^= t;
      q.limb(i) ^= t;
    }
  };
  swap_nat(a.x.value, b.x.value);
  swap_nat(a.z.value, b.z.value);
  const Bound bx = std::max(a.x.bound, b.x.bound), bz = std::max(a.z.bound, b.z.bound);
  a.x.bound = b.x.bound = bx;
  a.z.bound = b.z.bound = bz;
}

/// [2]P: X2 = (X+Z)^2 (X-Z)^2, Z2 = C ((X-Z)^2 + a24 C), C = (X+Z)^2 - (X-Z)^2.
template <LimbWord Limb, std::size_t N>
XZPoint<Limb, N> xz_double(const CurveParams<Limb, N>& curve, const XZPoint<Limb, N>& p,
                           MulCounter* counter = nullptr) {
  const auto& ctx = *curve.ctx;
  const ReductionMode mode = curve.cfg.mode;
  const auto t1 = mod_add(ctx, p.x, p.z, mode, counter);
  const auto t2 = mod_sub(ctx, p.x, p.z, mode, counter);
  const auto aa = mod_mul(ctx, t1, t1, curve.cfg, counter);
  const auto bb = mod_mul(ctx, t2, t2, curve.cfg, counter);
  const auto c = mod_sub(ctx, aa, bb, mode, counter);
  const auto x2 = mod_mul(ctx, aa, bb, curve.cfg, counter);
  const auto ac = mod_mul(ctx, curve.a24, c, curve.cfg, counter);
  const auto z2 = mod_mul(ctx, c, mod_add(ctx, bb, ac, mode, counter), curve.cfg, counter);
  return {x2, z2};
}

/// P + Q given P - Q = diff: X = Zd (da + cb)^2, Z = Xd (da - cb)^2 with
/// da = (Xp - Zp)(Xq + Zq), cb = (Xp + Zp)(Xq - Zq).
template <LimbWord Limb, std::size_t N>
XZPoint<Limb, N> xz_diffadd(const CurveParams<Limb, N>& curve, const XZPoint<Limb, N>& p, const XZPoint<Limb, N>& q,
                            const XZPoint<Limb, N>& diff, MulCounter* counter = nullptr) {
  const auto& ctx = *curve.ctx;
  const ReductionMode mode = curve.cfg.mode;
  const auto da = mod_mul(ctx, mod_sub(ctx, p.x, p.z, mode, counter), mod_add(ctx, q.x, q.z, mode, counter),
                          curve.cfg, counter);
  const auto cb = mod_mul(ctx, mod_add(ctx, p.x, p.z, mode, counter), mod_sub(ctx, q.x, q.z, mode, counter),
                          curve.cfg, counter);
  const auto s = mod_add(ctx, da, cb, mode, counter);
  const auto d = mod_sub(ctx, da, cb, mode, counter);
  const auto x = mod_mul(ctx, diff.z, mod_mul(ctx, s, s, curve.cfg, counter), curve.cfg, counter);
  const auto z = mod_mul(ctx, diff.x, mod_mul(ctx, d, d, curve.cfg, counter), curve.cfg, counter);
  return {x, z};
}

/// One ladder iteration (r0, r1) -> ([2]r0, r0 + r1) with r1 - r0 = diff.
/// X0 +- Z0 is shared between the double and the add: 8 add/sub, 11 mul.
template <LimbWord Limb, std::size_t N>
void ladder_step(const CurveParams<Limb, N>& curve, XZPoint<Limb, N>& r0, XZPoint<Limb, N>& r1,
                 const XZPoint<Limb, N>& diff, MulCounter* counter = nullptr) {
  const auto& ctx = *curve.ctx;
  const ReductionMode mode = curve.cfg.mode;
  const auto& cfg = curve.cfg;
  const auto sum0 = mod_add(ctx, r0.x, r0.z, mode, counter);
  const auto dif0 = mod_sub(ctx, r0.x, r0.z, mode, counter);
  const auto sum1 = mod_add(ctx, r1.x, r1.z, mode, counter);
  const auto dif1 = mod_sub(ctx, r1.x, r1.z, mode, counter);

  const auto da = mod_mul(ctx, dif0, sum1, cfg, counter);
  const auto cb = mod_mul(ctx, sum0, dif1, cfg, counter);
  const auto s = mod_add(ctx, da, cb, mode, counter);
  const auto d = mod_sub(ctx, da, cb, mode, counter);
  r1.x = mod_mul(ctx, diff.z, mod_mul(ctx, s, s, cfg, counter), cfg, counter);
  r1.z = mod_mul(ctx, diff.x, mod_mul(ctx, d, d, cfg, counter), cfg, counter);

  const auto aa = mod_mul(ctx, sum0, sum0, cfg, counter);
  const auto bb = mod_mul(ctx, dif0, dif0, cfg, counter);
  const auto c = mod_sub(ctx, aa, bb, mode, counter);
  r0.x = mod_mul(ctx, aa, bb, cfg, counter);
  r0.z = mod_mul(ctx, c, mod_add(ctx, bb, mod_mul(ctx, curve.a24, c, cfg, counter), mode, counter), cfg, counter);
}

/// Neutral element (1 : 0).
template <LimbWord Limb, std::size_t N>
XZPoint<Limb, N> xz_neutral(const MontCtx<Limb, N>& ctx) {
  return {{ctx.one(), Bound::canonical}, {FixedNat<Limb, N>{}, Bound::canonical}};
}

namespace detail {

template <class Scalar>
struct ScalarBits;

template <>
struct ScalarBits<std::uint64_t> {
  static std::size_t length(std::uint64_t s) noexcept { return static_cast<std::size_t>(std::bit_width(s)); }
  static bool bit(std::uint64_t s, std::size_t i) noexcept { return ((s >> i) & 1u) != 0; }
};

template <LimbWord L, std::size_t M>
struct ScalarBits<FixedNat<L, M>> {
  static std::size_t length(const FixedNat<L, M>& s) noexcept { return s.bit_length(); }
  static bool bit(const FixedNat<L, M>& s, std::size_t i) noexcept { return s.bit(i); }
};

}  // namespace detail

/// x([s]P) by the Montgomery ladder: one ladder_step per bit of s, with the
/// operands exchanged by a mask instead of a branch. s == 0 gives (1 : 0).
template <LimbWord Limb, std::size_t N, class Scalar>
XZPoint<Limb, N> ladder(const CurveParams<Limb, N>& curve, const XZPoint<Limb, N>& p, const Scalar& s,
                        MulCounter* counter = nullptr) {
  using Bits = detail::ScalarBits<Scalar>;
  XZPoint<Limb, N> r0 = xz_neutral(*curve.ctx), r1 = p;
  for (std::size_t i = Bits::length(s); i-- > 0;) {
    const Limb mask = static_cast<Limb>(Limb{0} - static_cast<Limb>(Bits::bit(s, i)));
    cswap(r0, r1, mask);
    ladder_step(curve, r0, r1, p, counter);
    cswap(r0, r1, mask);
  }
  return r0;
}

// ---------------------------------------------------------------------------
// Curve generation and stage 1

template <LimbWord Limb, std::size_t N>
struct CurveSetup {
  bool ok = false;
  CurveParams<Limb, N> curve;
  XZPoint<Limb, N> start;
  /// gcd that blocked the inversion when !ok
  FixedNat<Limb, N> blocking_gcd;
};

/// Suyama parametrisation: u = s^2 - 5, v = 4s, start (u^3 : v^3),
/// a24 = (v - u)^3 (3u + v) / (16 u^3 v). The single inversion may fail,
/// in which case its gcd with n is reported instead.
template <LimbWord Limb, std::size_t N>
CurveSetup<Limb, N> curve_from_sigma(const MontCtx<Limb, N>& ctx, const FixedNat<Limb, N>& sigma,
                                     KernelConfig cfg = {}, MulCounter* counter = nullptr) {
  using Nat = FixedNat<Limb, N>;
  const Nat& n = ctx.modulus();
  // setup runs canonically; the ladder then applies the chosen discipline
  const KernelConfig eager{cfg.strategy, ReductionMode::eager};
  auto mont = [&](std::uint64_t v) { return to_mont(ctx, div_rem(Nat::from_u64(v), n).remainder, counter); };
  auto mul = [&](const LazyResidue<Limb, N>& a, const LazyResidue<Limb, N>& b) {
    return mod_mul(ctx, a, b, eager, counter);
  };
  auto addm = [&](const LazyResidue<Limb, N>& a, const LazyResidue<Limb, N>& b) {
    return mod_add(ctx, a, b, ReductionMode::eager, counter);
  };
  auto subm = [&](const LazyResidue<Limb, N>& a, const LazyResidue<Limb, N>& b) {
    return mod_sub(ctx, a, b, ReductionMode::eager, counter);
  };

  const auto s = to_mont(ctx, div_rem(sigma, n).remainder, counter);
  const auto u = subm(mul(s, s), mont(5));
  const auto v = mul(mont(4), s);
  const auto u3 = mul(mul(u, u), u);
  const auto v3 = mul(mul(v, v), v);
  const auto vmu = subm(v, u);
  const auto num = mul(mul(mul(vmu, vmu), vmu), addm(mul(mont(3), u), v));
  const auto den = mul(mul(mont(16), u3), v);

  CurveSetup<Limb, N> out;
  const InverseResult<Limb, N> inv = mod_inverse(from_mont(ctx, den, counter), n);
  if (!inv.ok) {
    out.blocking_gcd = inv.value;
    out.curve = {&ctx, {Nat{}, Bound::canonical}, cfg};
    out.start = xz_neutral(ctx);
    return out;
  }
  out.ok = true;
  out.curve = {&ctx, mul(num, to_mont(ctx, inv.value, counter)), cfg};
  out.start = {u3, v3};
  return out;
}

/// gcd(v, n) for a residue of any lazy class; v and v mod n share it.
template <LimbWord Limb, std::size_t N>
FixedNat<Limb, N> residue_gcd(const MontCtx<Limb, N>& ctx, const LazyResidue<Limb, N>& v) {
  return gcd(canonicalize(ctx, v).value, ctx.modulus());
}

/// Classifies a gcd with n.
template <LimbWord Limb, std::size_t N>
Outcome classify_gcd(const FixedNat<Limb, N>& g, const FixedNat<Limb, N>& n) {
  if (g == n || g.is_zero()) return Outcome::trivial_gcd_n;
  if (g == FixedNat<Limb, N>::from_u64(1)) return Outcome::no_factor;
  if (!div_rem(n, g).remainder.is_zero()) throw ContractViolation("reported factor does not divide n");
  return Outcome::factor_found;
}

template <LimbWord Limb, std::size_t N>
StageResult<Limb, N> result_from_gcd(const FixedNat<Limb, N>& g, const FixedNat<Limb, N>& n, std::uint64_t sigma) {
  StageResult<Limb, N> r;
  r.outcome = classify_gcd(g, n);
  if (r.outcome == Outcome::factor_found) r.factor = g;
  r.sigma = sigma;
  r.curves_tried = 1;
  return r;
}

/// Stage 1 on one curve: ladders over each prime power of the plan in turn,
/// then a single gcd(Z, n).
template <LimbWord Limb, std::size_t N>
StageResult<Limb, N> stage1(const MontCtx<Limb, N>& ctx, const PrimePowerPlan& plan, std::uint64_t sigma,
                            KernelConfig cfg = {}) {
  MulCounter counter;
  const CurveSetup<Limb, N> setup = curve_from_sigma(ctx, FixedNat<Limb, N>::from_u64(sigma), cfg, &counter);
  StageResult<Limb, N> r;
  if (!setup.ok) {
    r = result_from_gcd(setup.blocking_gcd, ctx.modulus(), sigma);
  } else {
    XZPoint<Limb, N> p = setup.start;
    for (std::uint64_t q : plan.factors) p = ladder(setup.curve, p, q, &counter);
    r = result_from_gcd(residue_gcd(ctx, p.z), ctx.modulus(), sigma);
  }
  r.counters = counter;
  return r;
}

/// Validates a stage-1 modulus: odd and at least 3.
template <LimbWord Limb, std::size_t N>
void check_composite_candidate(const FixedNat<Limb, N>& n) {
  if (!n.is_odd()) throw InvalidModulus("n must be odd");
  if (n < FixedNat<Limb, N>::from_u64(9)) throw InvalidModulus("n must be an odd composite, at least 9");
}

template <LimbWord Limb, std::size_t N>
StageResult<Limb, N> stage1(const FixedNat<Limb, N>& n, std::uint64_t b1, std::uint64_t sigma,
                            KernelConfig cfg = {}) {
  check_composite_candidate(n);
  const MontCtx<Limb, N> ctx = mont_setup(n);
  return stage1(ctx, stage1_plan(b1), sigma, cfg);
}

/// Suyama seeds 6 <= sigma < 2^32 from a seeded 64-bit Mersenne twister.
std::vector<std::uint64_t> sigma_sequence(std::uint64_t seed, std::size_t count);

/// Tries up to `curves` curves and stops at the first proper factor.
/// curves_tried and counters cover every curve run.
template <LimbWord Limb, std::size_t N>
StageResult<Limb, N> factor(const FixedNat<Limb, N>& n, std::uint64_t b1, std::size_t curves, std::uint64_t seed,
                            KernelConfig cfg = {}) {
  check_composite_candidate(n);
  if (curves == 0) throw ConfigError("at least one curve is required");
  const MontCtx<Limb, N> ctx = mont_setup(n);
  const PrimePowerPlan plan = stage1_plan(b1);
  StageResult<Limb, N> last;
  MulCounter total;
  std::size_t tried = 0;
  for (std::uint64_t sigma : sigma_sequence(seed, curves)) {
    last = stage1(ctx, plan, sigma, cfg);
    total += last.counters;
    ++tried;
    if (last.outcome == Outcome::factor_found) break;
  }
  if (last.outcome != Outcome::factor_found) last.outcome = Outcome::no_factor;
  last.curves_tried = tried;
  last.counters = total;
  return last;
}

}  // namespace modarith
