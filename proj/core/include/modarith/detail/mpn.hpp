#pragma once

// Span-based limb kernels shared by the fixed-width types. Operands are
// little-endian limb sequences; output spans may alias the first input.

#include <algorithm>
#include <array>
#include <cassert>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>

#include "modarith/counter.hpp"

namespace modarith {

template <class T>
concept LimbWord = std::same_as<T, std::uint8_t> || std::same_as<T, std::uint16_t> ||
                   std::same_as<T, std::uint32_t> || std::same_as<T, std::uint64_t>;

namespace detail {
template <class T>
struct WideOf;
template <>
struct WideOf<std::uint8_t> {
  using type = std::uint16_t;
};
template <>
struct WideOf<std::uint16_t> {
  using type = std::uint32_t;
};
template <>
struct WideOf<std::uint32_t> {
  using type = std::uint64_t;
};
template <>
struct WideOf<std::uint64_t> {
  __extension__ using type = unsigned __int128;
};
}  // namespace detail

template <LimbWord Limb>
using wide_t = typename detail::WideOf<Limb>::type;

template <LimbWord Limb>
inline constexpr unsigned limb_bits = std::numeric_limits<Limb>::digits;

/// Largest operand (in limbs) the recursive kernels accept; bounds their
/// stack scratch.
inline constexpr std::size_t kMaxLimbs = 128;

enum class MulKind { schoolbook, karatsuba, toom3 };

/// Full-product multiplier selection. Recursive algorithms fall back to
/// schoolbook once an operand is at most `*_threshold` limbs.
struct MulConfig {
  MulKind kind = MulKind::schoolbook;
  std::size_t karatsuba_threshold = 8;
  std::size_t toom3_threshold = 24;
};

namespace mpn {

/// a * b mod B without the integer-promotion overflow of narrow limbs.
template <LimbWord Limb>
constexpr Limb mul_lo(Limb a, Limb b) noexcept {
  return static_cast<Limb>(static_cast<wide_t<Limb>>(a) * b);
}

template <LimbWord Limb>
using Scratch = std::array<Limb, 2 * kMaxLimbs + 8>;

template <LimbWord Limb>
constexpr void zero(std::span<Limb> r) noexcept {
  std::fill(r.begin(), r.end(), Limb{0});
}

template <LimbWord Limb>
constexpr void copy(std::span<Limb> r, std::span<const Limb> a) noexcept {
  assert(r.size() >= a.size());
  std::copy(a.begin(), a.end(), r.begin());
  std::fill(r.begin() + static_cast<std::ptrdiff_t>(a.size()), r.end(), Limb{0});
}

template <LimbWord Limb>
constexpr bool is_zero(std::span<const Limb> a) noexcept {
  return std::all_of(a.begin(), a.end(), [](Limb x) { return x == 0; });
}

template <LimbWord Limb>
constexpr int cmp(std::span<const Limb> a, std::span<const Limb> b) noexcept {
  assert(a.size() == b.size());
  for (std::size_t i = a.size(); i-- > 0;) {
    if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
  }
  return 0;
}

/// r = a + b + carry over r.size() limbs; returns the carry out.
template <LimbWord Limb>
constexpr Limb add_n(std::span<Limb> r, std::span<const Limb> a, std::span<const Limb> b,
                     Limb carry = 0) noexcept {
  assert(a.size() >= r.size() && b.size() >= r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    const Limb s = static_cast<Limb>(a[i] + carry);
    const Limb c1 = s < carry;
    const Limb t = static_cast<Limb>(s + b[i]);
    carry = static_cast<Limb>(c1 + (t < s));
    r[i] = t;
  }
  return carry;
}

/// r = a - b - borrow over r.size() limbs; returns the borrow out.
template <LimbWord Limb>
constexpr Limb sub_n(std::span<Limb> r, std::span<const Limb> a, std::span<const Limb> b,
                     Limb borrow = 0) noexcept {
  assert(a.size() >= r.size() && b.size() >= r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    const Limb ai = a[i];
    const Limb d = static_cast<Limb>(ai - b[i]);
    const Limb b1 = ai < b[i];
    const Limb e = static_cast<Limb>(d - borrow);
    const Limb b2 = d < borrow;
    borrow = static_cast<Limb>(b1 | b2);
    r[i] = e;
  }
  return borrow;
}

/// r += c, propagating through all of r; returns the carry out.
template <LimbWord Limb>
constexpr Limb add_1(std::span<Limb> r, Limb c) noexcept {
  for (std::size_t i = 0; i < r.size() && c != 0; ++i) {
    r[i] = static_cast<Limb>(r[i] + c);
    c = r[i] < c;
  }
  return c;
}

template <LimbWord Limb>
constexpr Limb sub_1(std::span<Limb> r, Limb c) noexcept {
  for (std::size_t i = 0; i < r.size() && c != 0; ++i) {
    const Limb old = r[i];
    r[i] = static_cast<Limb>(old - c);
    c = old < c;
  }
  return c;
}

/// r += a where a.size() <= r.size(); returns the carry out of r.
template <LimbWord Limb>
constexpr Limb add_into(std::span<Limb> r, std::span<const Limb> a) noexcept {
  assert(a.size() <= r.size());
  const Limb c = add_n<Limb>(r.first(a.size()), r, a);
  return add_1<Limb>(r.subspan(a.size()), c);
}

/// r -= a where a.size() <= r.size(); returns the borrow out of r.
template <LimbWord Limb>
constexpr Limb sub_from(std::span<Limb> r, std::span<const Limb> a) noexcept {
  assert(a.size() <= r.size());
  const Limb b = sub_n<Limb>(r.first(a.size()), r, a);
  return sub_1<Limb>(r.subspan(a.size()), b);
}

/// r = a * c; returns the high limb.
template <LimbWord Limb>
constexpr Limb mul_1(std::span<Limb> r, std::span<const Limb> a, Limb c) noexcept {
  using W = wide_t<Limb>;
  Limb carry = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const W p = static_cast<W>(static_cast<W>(a[i]) * c + carry);
    r[i] = static_cast<Limb>(p);
    carry = static_cast<Limb>(p >> limb_bits<Limb>);
  }
  return carry;
}

/// r[0..a.size()) += a * c; returns the high limb.
template <LimbWord Limb>
constexpr Limb addmul_1(std::span<Limb> r, std::span<const Limb> a, Limb c) noexcept {
  using W = wide_t<Limb>;
  Limb carry = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const W p = static_cast<W>(static_cast<W>(a[i]) * c + r[i] + carry);
    r[i] = static_cast<Limb>(p);
    carry = static_cast<Limb>(p >> limb_bits<Limb>);
  }
  return carry;
}

/// r = a >> bits, 0 < bits < limb width; `fill` supplies the incoming top bits.
template <LimbWord Limb>
constexpr void rshift(std::span<Limb> r, std::span<const Limb> a, unsigned bits,
                      Limb fill = 0) noexcept {
  assert(bits > 0 && bits < limb_bits<Limb>);
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Limb hi = i + 1 < n ? a[i + 1] : fill;
    r[i] = static_cast<Limb>((a[i] >> bits) | static_cast<Limb>(hi << (limb_bits<Limb> - bits)));
  }
}

/// Quotient by a single limb, returning the remainder.
template <LimbWord Limb>
constexpr Limb divrem_1(std::span<Limb> q, std::span<const Limb> a, Limb d) noexcept {
  using W = wide_t<Limb>;
  W rem = 0;
  for (std::size_t i = a.size(); i-- > 0;) {
    const W cur = static_cast<W>((rem << limb_bits<Limb>) | a[i]);
    q[i] = static_cast<Limb>(cur / d);
    rem = cur % d;
  }
  return static_cast<Limb>(rem);
}

/// r = a * 3^-1 mod B^n, linear time. Exact quotient whenever 3 | a.
template <LimbWord Limb>
constexpr void mul_inverse3(std::span<Limb> r, std::span<const Limb> a) noexcept {
  using W = wide_t<Limb>;
  Limb inv = 3;  // Newton: each step doubles the correct low bits
  for (int i = 0; i < 6; ++i) inv = mul_lo<Limb>(inv, static_cast<Limb>(2 - mul_lo<Limb>(3, inv)));
  Limb borrow = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Limb ai = a[i];
    const Limb t = static_cast<Limb>(ai - borrow);
    const Limb b1 = ai < borrow;
    const Limb q = mul_lo<Limb>(t, inv);
    r[i] = q;
    const W p = static_cast<W>(static_cast<W>(q) * 3u);
    borrow = static_cast<Limb>((p >> limb_bits<Limb>) + b1);
  }
}

/// r = -a mod B^n.
template <LimbWord Limb>
constexpr void negate(std::span<Limb> r, std::span<const Limb> a) noexcept {
  Limb carry = 1;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Limb v = static_cast<Limb>(~a[i]);
    r[i] = static_cast<Limb>(v + carry);
    carry = r[i] < carry;
  }
}

/// Branch-free select over limbs: r = mask ? a : b, mask all-ones or zero.
template <LimbWord Limb>
constexpr void select(std::span<Limb> r, Limb mask, std::span<const Limb> a,
                      std::span<const Limb> b) noexcept {
  for (std::size_t i = 0; i < r.size(); ++i) {
    r[i] = static_cast<Limb>((a[i] & mask) | (b[i] & static_cast<Limb>(~mask)));
  }
}

// ---------------------------------------------------------------------------
// Full products

/// Schoolbook: r = a * b, r.size() == a.size() + b.size().
template <LimbWord Limb>
constexpr void mul_basecase(std::span<Limb> r, std::span<const Limb> a, std::span<const Limb> b,
                            MulCounter* counter) noexcept {
  assert(r.size() == a.size() + b.size());
  zero(r);
  for (std::size_t j = 0; j < b.size(); ++j) {
    r[a.size() + j] = addmul_1<Limb>(r.subspan(j, a.size()), a, b[j]);
  }
  if (counter) counter->submuls += a.size() * b.size();
}

/// r = (xc*B^h + x) * (yc*B^h + y) for h-limb x, y and small carry digits.
/// Only x*y is a sub-multiplication; the carry-digit terms are linear scaling.
/// r.size() == 2h + 1.
template <LimbWord Limb, class SubMul>
constexpr void mul_with_carry_digits(std::span<Limb> r, std::span<const Limb> x, Limb xc,
                                     std::span<const Limb> y, Limb yc, SubMul&& sub) {
  const std::size_t h = x.size();
  assert(y.size() == h && r.size() == 2 * h + 1);
  sub(r.first(2 * h), x, y);
  r[2 * h] = mul_lo<Limb>(xc, yc);
  Limb c = addmul_1<Limb>(r.subspan(h, h), y, xc);
  add_1<Limb>(r.subspan(2 * h), c);
  c = addmul_1<Limb>(r.subspan(h, h), x, yc);
  add_1<Limb>(r.subspan(2 * h), c);
}

/// Values of a three-part polynomial at 1, -1 and 2, each an h-limb body
/// plus a small carry digit; the value at -1 as magnitude and sign.
template <LimbWord Limb>
struct Toom3Eval {
  Scratch<Limb> one, minus, two;
  Limb c_one = 0, c_minus = 0, c_two = 0;
  bool minus_negative = false;
};

/// Evaluates p0 + p1 x + p2 x^2 for the three h-limb parts of `p` (3h limbs).
template <LimbWord Limb>
constexpr void toom3_evaluate(std::span<const Limb> p, Toom3Eval<Limb>& e) {
  const std::size_t h = p.size() / 3;
  const std::span<const Limb> p0 = p.first(h), p1 = p.subspan(h, h), p2 = p.subspan(2 * h, h);
  const std::span<Limb> one(e.one.data(), h), minus(e.minus.data(), h), two(e.two.data(), h);
  Scratch<Limb> s02;
  const std::span<Limb> even(s02.data(), h);
  const Limb ce = add_n<Limb>(even, p0, p2);
  e.c_one = static_cast<Limb>(ce + add_n<Limb>(one, even, p1));
  if (ce != 0 || cmp<Limb>(even, p1) >= 0) {
    e.c_minus = static_cast<Limb>(ce - sub_n<Limb>(minus, even, p1));
    e.minus_negative = false;
  } else {
    sub_n<Limb>(minus, p1, even);
    e.c_minus = 0;
    e.minus_negative = true;
  }
  copy<Limb>(two, p0);
  e.c_two = static_cast<Limb>(addmul_1<Limb>(two, p1, 2) + addmul_1<Limb>(two, p2, 4));
}

/// Middle coefficients c1, c2, c3 of a degree-4 product polynomial from its
/// values at 0, 1, -1 (magnitude plus sign), 2 and infinity. All spans share
/// one length, wide enough for every intermediate (2h + 2 limbs suffices for
/// h-limb parts).
template <LimbWord Limb>
constexpr void interpolate_toom3(std::span<const Limb> w0, std::span<const Limb> w1,
                                 std::span<const Limb> wm, bool wm_negative,
                                 std::span<const Limb> w2, std::span<const Limb> w4,
                                 std::span<Limb> c1, std::span<Limb> c2, std::span<Limb> c3) {
  const std::size_t len = w0.size();
  Scratch<Limb> sbuf{}, dbuf{}, ubuf{}, tbuf{};
  const std::span<Limb> s(sbuf.data(), len), d(dbuf.data(), len), u(ubuf.data(), len),
      tmp(tbuf.data(), len);
  [[maybe_unused]] Limb flow = 0;
  // s = 2(c0 + c2 + c4), d = 2(c1 + c3)
  if (wm_negative) {
    flow |= sub_n<Limb>(s, w1, wm);
    flow |= add_n<Limb>(d, w1, wm);
  } else {
    flow |= add_n<Limb>(s, w1, wm);
    flow |= sub_n<Limb>(d, w1, wm);
  }
  rshift<Limb>(c2, s, 1);
  flow |= sub_from<Limb>(c2, w0);
  flow |= sub_from<Limb>(c2, w4);
  rshift<Limb>(d, d, 1);  // c1 + c3
  // u = (w2 - w0 - 16 w4 - 4 c2) / 2 = c1 + 4 c3
  copy<Limb>(u, w2);
  flow |= sub_from<Limb>(u, w0);
  flow |= mul_1<Limb>(tmp, w4, 16);
  flow |= sub_from<Limb>(u, tmp);
  flow |= mul_1<Limb>(tmp, c2, 4);
  flow |= sub_from<Limb>(u, tmp);
  rshift<Limb>(u, u, 1);
  flow |= sub_from<Limb>(u, d);
  [[maybe_unused]] const Limb rem = divrem_1<Limb>(c3, u, 3);
  assert(rem == 0);
  flow |= sub_n<Limb>(c1, d, c3);
  assert(flow == 0);
}

template <LimbWord Limb>
void mul_karatsuba_n(std::span<Limb> r, std::span<const Limb> a, std::span<const Limb> b,
                     std::size_t threshold, MulCounter* counter);
template <LimbWord Limb>
void mul_toom3_n(std::span<Limb> r, std::span<const Limb> a, std::span<const Limb> b,
                 std::size_t threshold, MulCounter* counter);

/// Toom-2 (Karatsuba-Ofman) with evaluation at 0, 1 and infinity. Operands
/// are zero-padded to an even limb count; sub-products recurse.
template <LimbWord Limb>
void mul_karatsuba_n(std::span<Limb> r, std::span<const Limb> a, std::span<const Limb> b,
                     std::size_t threshold, MulCounter* counter) {
  const std::size_t n = a.size();
  assert(b.size() == n && r.size() == 2 * n && n <= kMaxLimbs);
  if (n <= std::max<std::size_t>(threshold, 1)) {
    mul_basecase<Limb>(r, a, b, counter);
    return;
  }
  const std::size_t h = (n + 1) / 2;
  Scratch<Limb> ap{}, bp{};
  copy<Limb>(std::span<Limb>(ap).first(2 * h), a);
  copy<Limb>(std::span<Limb>(bp).first(2 * h), b);
  const std::span<const Limb> a0(ap.data(), h), a1(ap.data() + h, h);
  const std::span<const Limb> b0(bp.data(), h), b1(bp.data() + h, h);

  auto sub = [&](std::span<Limb> out, std::span<const Limb> x, std::span<const Limb> y) {
    mul_karatsuba_n<Limb>(out, x, y, threshold, counter);
  };

  Scratch<Limb> res{}, w1{}, sa{}, sb{};
  const std::span<Limb> out(res.data(), 4 * h + 2);
  zero(out);
  sub(out.first(2 * h), a0, b0);
  sub(out.subspan(2 * h, 2 * h), a1, b1);

  const Limb ca = add_n<Limb>(std::span<Limb>(sa).first(h), a0, a1);
  const Limb cb = add_n<Limb>(std::span<Limb>(sb).first(h), b0, b1);
  const std::span<Limb> mid(w1.data(), 2 * h + 1);
  mul_with_carry_digits<Limb>(mid, std::span<const Limb>(sa.data(), h), ca,
                              std::span<const Limb>(sb.data(), h), cb, sub);
  // linear term = w1 - w0 - winf, never negative
  [[maybe_unused]] Limb br = sub_from<Limb>(mid, std::span<const Limb>(out.data(), 2 * h));
  br |= sub_from<Limb>(mid, std::span<const Limb>(out.data() + 2 * h, 2 * h));
  assert(br == 0);
  add_into<Limb>(out.subspan(h), mid);
  std::copy_n(out.begin(), 2 * n, r.begin());
}

/// Toom-3 with evaluation points {0, 1, -1, 2, inf}. Operands are zero-padded
/// to a multiple of three limbs. The value at -1 is kept as sign and
/// magnitude; interpolation uses exact halvings and one exact division by 3,
/// ordered so every intermediate stays non-negative.
template <LimbWord Limb>
void mul_toom3_n(std::span<Limb> r, std::span<const Limb> a, std::span<const Limb> b,
                 std::size_t threshold, MulCounter* counter) {
  const std::size_t n = a.size();
  assert(b.size() == n && r.size() == 2 * n && n <= kMaxLimbs);
  if (n <= std::max<std::size_t>(threshold, 1)) {
    mul_basecase<Limb>(r, a, b, counter);
    return;
  }
  const std::size_t h = (n + 2) / 3;
  Scratch<Limb> ap{}, bp{};
  copy<Limb>(std::span<Limb>(ap).first(3 * h), a);
  copy<Limb>(std::span<Limb>(bp).first(3 * h), b);

  auto sub = [&](std::span<Limb> out, std::span<const Limb> x, std::span<const Limb> y) {
    mul_toom3_n<Limb>(out, x, y, threshold, counter);
  };

  Toom3Eval<Limb> ea, eb;
  toom3_evaluate<Limb>(std::span<const Limb>(ap.data(), 3 * h), ea);
  toom3_evaluate<Limb>(std::span<const Limb>(bp.data(), 3 * h), eb);

  const std::size_t len = 2 * h + 2;
  Scratch<Limb> w0{}, w1{}, wm{}, w2{}, w4{};
  sub(std::span<Limb>(w0).first(2 * h), std::span<const Limb>(ap.data(), h),
      std::span<const Limb>(bp.data(), h));
  mul_with_carry_digits<Limb>(std::span<Limb>(w1).first(2 * h + 1),
                              std::span<const Limb>(ea.one.data(), h), ea.c_one,
                              std::span<const Limb>(eb.one.data(), h), eb.c_one, sub);
  mul_with_carry_digits<Limb>(std::span<Limb>(wm).first(2 * h + 1),
                              std::span<const Limb>(ea.minus.data(), h), ea.c_minus,
                              std::span<const Limb>(eb.minus.data(), h), eb.c_minus, sub);
  mul_with_carry_digits<Limb>(std::span<Limb>(w2).first(2 * h + 1),
                              std::span<const Limb>(ea.two.data(), h), ea.c_two,
                              std::span<const Limb>(eb.two.data(), h), eb.c_two, sub);
  sub(std::span<Limb>(w4).first(2 * h), std::span<const Limb>(ap.data() + 2 * h, h),
      std::span<const Limb>(bp.data() + 2 * h, h));
  const bool wm_negative = ea.minus_negative != eb.minus_negative;

  Scratch<Limb> c1{}, c2{}, c3{};
  interpolate_toom3<Limb>(std::span<const Limb>(w0.data(), len), std::span<const Limb>(w1.data(), len),
                          std::span<const Limb>(wm.data(), len), wm_negative,
                          std::span<const Limb>(w2.data(), len), std::span<const Limb>(w4.data(), len),
                          std::span<Limb>(c1.data(), len), std::span<Limb>(c2.data(), len),
                          std::span<Limb>(c3.data(), len));

  Scratch<Limb> res{};
  const std::span<Limb> out(res.data(), 6 * h + 4);
  zero(out);
  add_into<Limb>(out, std::span<const Limb>(w0.data(), 2 * h));
  add_into<Limb>(out.subspan(h), std::span<const Limb>(c1.data(), len));
  add_into<Limb>(out.subspan(2 * h), std::span<const Limb>(c2.data(), len));
  add_into<Limb>(out.subspan(3 * h), std::span<const Limb>(c3.data(), len));
  add_into<Limb>(out.subspan(4 * h), std::span<const Limb>(w4.data(), 2 * h));
  assert(is_zero<Limb>(std::span<const Limb>(out.data() + 2 * n, out.size() - 2 * n)));
  std::copy_n(out.begin(), 2 * n, r.begin());
}

/// Full product through the configured multiplier; r.size() == 2 * a.size().
template <LimbWord Limb>
void mul_full_n(std::span<Limb> r, std::span<const Limb> a, std::span<const Limb> b,
                const MulConfig& cfg, MulCounter* counter) {
  switch (cfg.kind) {
    case MulKind::schoolbook:
      mul_basecase<Limb>(r, a, b, counter);
      return;
    case MulKind::karatsuba:
      mul_karatsuba_n<Limb>(r, a, b, cfg.karatsuba_threshold, counter);
      return;
    case MulKind::toom3:
      mul_toom3_n<Limb>(r, a, b, cfg.toom3_threshold, counter);
      return;
  }
}

}  // namespace mpn
}  // namespace modarith
