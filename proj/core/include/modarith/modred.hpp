#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

#include "modarith/errors.hpp"
#include "modarith/mpnat.hpp"
#include "modarith/truncmul.hpp"

namespace modarith {

#ifdef MODARITH_VERIFY_BOUNDS
inline constexpr bool kVerifyBounds = true;
#else
inline constexpr bool kVerifyBounds = false;
#endif

/// Magnitude class of a Montgomery-form residue, with R' = 2^n >= m where n
/// is the bit length of the modulus. Ordered from tightest to loosest.
enum class Bound : std::uint8_t {
  canonical,  ///< value < m
  lt_2m,      ///< value < 2m, the lazy working range
  lt_2rp,     ///< value < 2R'
  lt_3rp,     ///< value < 3R'
  lt_13_4rp,  ///< value < (13/4)R'
};

std::string_view to_string(Bound b) noexcept;

enum class RedcStrategy { classic, opt_schoolbook, opt_split_k2, opt_split_k3 };

std::string_view to_string(RedcStrategy s) noexcept;
/// Accepts classic | opt-schoolbook | opt-k2 | opt-k3.
RedcStrategy parse_strategy(std::string_view name);

/// Full-product multiplier used alongside each strategy.
MulConfig mul_config_for(RedcStrategy s) noexcept;

/// eager: canonicalise after every add, sub and mul.
/// lazy: keep residues below 2m; only add/sub select.
enum class ReductionMode { eager, lazy };

template <LimbWord Limb, std::size_t N>
struct LazyResidue {
  FixedNat<Limb, N> value;
  Bound bound = Bound::canonical;

  friend bool operator==(const LazyResidue&, const LazyResidue&) = default;
};

// ---------------------------------------------------------------------------
// Barrett

template <LimbWord Limb, std::size_t N>
class BarrettCtx {
 public:
  using Nat = FixedNat<Limb, N>;
  using Wide = FixedNat<Limb, 2 * N>;

  /// R = 2^n with n the bit length of m; mu = floor(R^2 / m).
  static BarrettCtx setup(const Nat& m) {
    if (!m.is_odd()) throw InvalidModulus("Barrett modulus must be odd");
    if (m < Nat::from_u64(3)) throw InvalidModulus("Barrett modulus must be at least 3");
    BarrettCtx ctx;
    ctx.m_ = m;
    ctx.n_ = m.bit_length();
    // R^2 may need every bit of 2N limbs plus one; mu itself has n + 1 bits
    using Wider = FixedNat<Limb, 2 * N + 1>;
    ctx.mu_ = div_rem(Wider::power_of_two(2 * ctx.n_), m.template resized<2 * N + 1>())
                  .quotient.template resized<2 * N>();
    ctx.m_squared_ = mul_schoolbook(m, m);
    return ctx;
  }

  const Nat& modulus() const noexcept { return m_; }
  std::size_t bits() const noexcept { return n_; }
  const Wide& mu() const noexcept { return mu_; }

  /// a mod m for a < m^2: r = a - floor(floor(a / R) mu / R) m, then the
  /// in-range one of r, r - m, r - 2m, r - 3m is selected without branching.
  /// With both shifts by n the quotient can fall 3 short, so r < 4m.
  Nat reduce(const Wide& a, MulCounter* counter = nullptr) const {
    if (a >= m_squared_) throw ContractViolation("barrett_reduce: input must be below m^2");
    const Wide q1 = a.shr(n_);
    const FixedNat<Limb, 4 * N> q1mu = mul_schoolbook(q1, mu_, counter);
    const Nat q = q1mu.shr(n_).template resized<N>();
    const Wide qm = mul_schoolbook(q, m_, counter);
    const Wide r = sub(a, qm).diff;
    const Wide mw = m_.template resized<2 * N>();
    const SubResult<Limb, 2 * N> r1 = sub(r, mw);
    const SubResult<Limb, 2 * N> r2 = sub(r1.diff, mw);
    const SubResult<Limb, 2 * N> r3 = sub(r2.diff, mw);
    auto mask = [](bool b) { return static_cast<Limb>(Limb{0} - static_cast<Limb>(b)); };
    Wide out = r3.diff;
    mpn::select<Limb>(out.limbs(), mask(r3.borrow), r2.diff.limbs(), out.limbs());
    mpn::select<Limb>(out.limbs(), mask(r2.borrow), r1.diff.limbs(), out.limbs());
    mpn::select<Limb>(out.limbs(), mask(r1.borrow), r.limbs(), out.limbs());
    if (counter) counter->cond_reductions += 1;
    return out.template resized<N>();
  }

 private:
  Nat m_;
  std::size_t n_ = 0;
  Wide mu_;
  Wide m_squared_;
};

template <LimbWord Limb, std::size_t N>
BarrettCtx<Limb, N> barrett_setup(const FixedNat<Limb, N>& m) {
  return BarrettCtx<Limb, N>::setup(m);
}

template <LimbWord Limb, std::size_t N>
FixedNat<Limb, N> barrett_reduce(const BarrettCtx<Limb, N>& ctx, const FixedNat<Limb, 2 * N>& a,
                                 MulCounter* counter = nullptr) {
  return ctx.reduce(a, counter);
}

// ---------------------------------------------------------------------------
// Montgomery context

/// Precomputed data for a fixed odd modulus m of n bits inside an N-limb
/// work width. R = 2^(N * limb_bits) is limb aligned and at least 4R',
/// R' = 2^n, which is what lets products of lazy residues skip reduction.
template <LimbWord Limb, std::size_t N>
class MontCtx {
 public:
  using Nat = FixedNat<Limb, N>;
  using Wide = FixedNat<Limb, 2 * N>;

  static MontCtx setup(const Nat& m) {
    if (!m.is_odd()) throw InvalidModulus("Montgomery modulus must be odd");
    if (m < Nat::from_u64(3)) throw InvalidModulus("Montgomery modulus must be at least 3");
    if (m.bit_length() + 2 > Nat::width_bits) {
      throw WidthError("modulus of " + std::to_string(m.bit_length()) + " bits leaves no two-bit headroom in " +
                       std::to_string(Nat::width_bits) + "-bit limbs");
    }
    MontCtx ctx;
    ctx.m_ = m;
    ctx.n_ = m.bit_length();
    ctx.m_prime_ = negated_inverse(m);
    ctx.two_m_ = m.shl(1);
    ctx.four_m_ = m.shl(2);
    const Wide mw = m.template resized<2 * N>();
    const Wide r_mod_m = div_rem(Wide::power_of_two(Nat::width_bits), mw).remainder;
    ctx.one_ = r_mod_m.template resized<N>();
    ctx.r2_ = div_rem(mul_schoolbook(ctx.one_, ctx.one_), mw).remainder.template resized<N>();
    ctx.limit_two_rp_ = Nat::power_of_two(ctx.n_ + 1);
    ctx.limit_three_rp_ = add(Nat::power_of_two(ctx.n_ + 1), Nat::power_of_two(ctx.n_)).sum;
    ctx.limit_13_4_rp_ = mul_low(Nat::from_u64(13), Nat::power_of_two(ctx.n_ - 2), Nat::width_bits, 1.0);
    return ctx;
  }

  const Nat& modulus() const noexcept { return m_; }
  /// Bit length n of the modulus; R' = 2^n.
  std::size_t bits() const noexcept { return n_; }
  std::size_t r_exp() const noexcept { return Nat::width_bits; }
  std::size_t r_prime_exp() const noexcept { return n_; }
  /// m' with m m' = -1 (mod R).
  const Nat& m_prime() const noexcept { return m_prime_; }
  const Nat& two_m() const noexcept { return two_m_; }
  const Nat& four_m() const noexcept { return four_m_; }
  /// R mod m, the Montgomery form of 1.
  const Nat& one() const noexcept { return one_; }
  /// R^2 mod m.
  const Nat& r2() const noexcept { return r2_; }

  /// Exclusive upper limit of a bound class.
  const Nat& limit(Bound b) const noexcept {
    switch (b) {
      case Bound::canonical:
        return m_;
      case Bound::lt_2m:
        return two_m_;
      case Bound::lt_2rp:
        return limit_two_rp_;
      case Bound::lt_3rp:
        return limit_three_rp_;
      case Bound::lt_13_4rp:
        return limit_13_4_rp_;
    }
    return m_;
  }

  bool satisfies(const Nat& v, Bound b) const noexcept { return v < limit(b); }

  /// Copy whose m' has one bit flipped. Self-test fault injection only.
  MontCtx with_corrupted_m_prime() const {
    MontCtx c = *this;
    c.m_prime_.limb(0) ^= static_cast<Limb>(2);
    return c;
  }

 private:
  /// -m^-1 mod R by Hensel lifting: a word inverse, then Newton steps
  /// x <- x (2 - m x) that double the number of correct limbs.
  static Nat negated_inverse(const Nat& m) {
    Limb inv = m.limb(0);  // correct to 3 bits for odd m
    for (int i = 0; i < 6; ++i) inv = mpn::mul_lo<Limb>(inv, static_cast<Limb>(2 - mpn::mul_lo<Limb>(m.limb(0), inv)));
    Nat x;
    x.limb(0) = inv;
    const Nat two = Nat::from_u64(2);
    for (std::size_t good = 1; good < N; good *= 2) {
      const Nat mx = mul_low(m, x, Nat::width_bits, 1.0);
      x = mul_low(x, sub(two, mx).diff, Nat::width_bits, 1.0);
    }
    return sub(Nat{}, x).diff;
  }

  Nat m_;
  std::size_t n_ = 0;
  Nat m_prime_;
  Nat two_m_;
  Nat four_m_;
  Nat one_;
  Nat r2_;
  Nat limit_two_rp_;
  Nat limit_three_rp_;
  Nat limit_13_4_rp_;
};

template <LimbWord Limb, std::size_t N>
MontCtx<Limb, N> mont_setup(const FixedNat<Limb, N>& m) {
  return MontCtx<Limb, N>::setup(m);
}

namespace detail {

template <LimbWord Limb, std::size_t N>
LazyResidue<Limb, N> make_residue(const MontCtx<Limb, N>& ctx, const FixedNat<Limb, N>& v, Bound b) {
  if constexpr (kVerifyBounds) {
    if (!ctx.satisfies(v, b)) {
      throw ContractViolation("residue " + v.to_hex() + " violates bound " + std::string(to_string(b)));
    }
  }
  return {v, b};
}

/// b = (a mod R) m' mod R, the low half product shared by every strategy.
template <LimbWord Limb, std::size_t N>
FixedNat<Limb, N> redc_quotient(const MontCtx<Limb, N>& ctx, const FixedNat<Limb, 2 * N>& a,
                                const MulConfig& cfg, MulCounter* counter) {
  FixedNat<Limb, N> b;
  mpn::mul_low_n<Limb>(b.limbs(), a.limbs().template first<N>(), ctx.m_prime().limbs(), default_rho(cfg.kind),
                       cfg, counter);
  return b;
}

/// (a + bm) / R given the full bm.
template <LimbWord Limb, std::size_t N>
FixedNat<Limb, N> redc_finish(const FixedNat<Limb, 2 * N>& a, std::span<const Limb> bm) {
  FixedNat<Limb, 2 * N> sum;
  [[maybe_unused]] const Limb carry = mpn::add_n<Limb>(sum.limbs(), a.limbs(), bm.first(2 * N));
  assert(carry == 0);
  assert(mpn::is_zero<Limb>(sum.limbs().template first<N>()));
  FixedNat<Limb, N> r;
  std::copy_n(sum.limbs().begin() + N, N, r.limbs().begin());
  return r;
}

/// Low 2h limbs of -a, which equal those of bm since a + bm = 0 (mod R).
template <LimbWord Limb, std::size_t N>
void negated_low(std::span<Limb> out, const FixedNat<Limb, 2 * N>& a) {
  mpn::negate<Limb>(out, a.limbs().first(out.size()));
}

template <LimbWord Limb, std::size_t N>
FixedNat<Limb, N> redc_classic_kernel(const MontCtx<Limb, N>& ctx, const FixedNat<Limb, 2 * N>& a,
                                      MulCounter* counter) {
  const MulConfig cfg{};
  const FixedNat<Limb, N> b = redc_quotient(ctx, a, cfg, counter);
  const FixedNat<Limb, 2 * N> bm = mul_schoolbook(b, ctx.modulus(), counter);
  return redc_finish<Limb, N>(a, bm.limbs());
}

/// bm from the three half products m1b1, m1b0, m0b1; m0b0 is the low 2h
/// limbs of -(a + (m1b0 + m0b1) B^h).
template <LimbWord Limb, std::size_t N>
FixedNat<Limb, N> redc_opt_schoolbook_kernel(const MontCtx<Limb, N>& ctx, const FixedNat<Limb, 2 * N>& a,
                                             MulCounter* counter) {
  if constexpr (N < 2) {
    throw ConfigError("opt-schoolbook REDC needs at least two limbs");
  } else {
    constexpr std::size_t h = N / 2;
    constexpr std::size_t t = N - h;
    const FixedNat<Limb, N> b = redc_quotient(ctx, a, MulConfig{}, counter);
    const std::span<const Limb> m = ctx.modulus().limbs(), bl = b.limbs();
    const auto m0 = m.first(h), m1 = m.subspan(h, t), b0 = bl.first(h), b1 = bl.subspan(h, t);

    std::array<Limb, 2 * N + 2> bm{};
    std::array<Limb, N + 1> mid{};
    std::array<Limb, N> cross;
    mpn::mul_basecase<Limb>(std::span<Limb>(bm).subspan(2 * h, 2 * t), m1, b1, counter);
    mpn::mul_basecase<Limb>(std::span<Limb>(mid).first(N), m1, b0, counter);
    mpn::mul_basecase<Limb>(cross, m0, b1, counter);
    mid[N] = mpn::add_n<Limb>(std::span<Limb>(mid).first(N), mid, cross);

    // m0b0 = -(a + mid B^h) mod B^2h
    std::array<Limb, 2 * h> low;
    std::copy_n(a.limbs().begin(), 2 * h, low.begin());
    mpn::add_n<Limb>(std::span<Limb>(low).subspan(h), std::span<const Limb>(low).subspan(h),
                     std::span<const Limb>(mid).first(h));
    mpn::negate<Limb>(std::span<Limb>(bm).first(2 * h), low);
    mpn::add_into<Limb>(std::span<Limb>(bm).subspan(h), std::span<const Limb>(mid));
    return redc_finish<Limb, N>(a, bm);
  }
}

/// Limb size of the low parts for a k-way split of N limbs: ceil(N/k) when
/// the two lowest parts still fit inside R, floor(N/k) otherwise.
template <std::size_t N>
constexpr std::size_t split_part_limbs(std::size_t k) noexcept {
  const std::size_t up = (N + k - 1) / k;
  return 2 * up <= N ? up : N / k;
}

/// Toom-2 bm with 2 sub-products: w1 = b(1) m(1), winf = b1 m1. The low
/// digits of the linear term come from w1 - winf - (-a mod B^h); then
/// w0 = -a - l0 B^h (mod B^2h) closes the interpolation.
template <LimbWord Limb, std::size_t N>
FixedNat<Limb, N> redc_split2_kernel(const MontCtx<Limb, N>& ctx, const FixedNat<Limb, 2 * N>& a,
                                     MulCounter* counter) {
  constexpr std::size_t h = split_part_limbs<N>(2);
  if constexpr (h == 0) {
    throw ConfigError("split REDC with k=2 needs at least two limbs");
  } else {
    constexpr std::size_t t = N - h;  // top part; t == h or h + 1
    const MulConfig cfg = mul_config_for(RedcStrategy::opt_split_k2);
    const FixedNat<Limb, N> b = redc_quotient(ctx, a, cfg, counter);
    auto sub_mul = [&](std::span<Limb> out, std::span<const Limb> x, std::span<const Limb> y) {
      mpn::mul_karatsuba_n<Limb>(out, x, y, cfg.karatsuba_threshold, counter);
    };

    std::array<Limb, t> m0{}, b0{}, sm, sb;
    std::copy_n(ctx.modulus().limbs().begin(), h, m0.begin());
    std::copy_n(b.limbs().begin(), h, b0.begin());
    const std::span<const Limb> m1 = ctx.modulus().limbs().subspan(h, t), b1 = b.limbs().subspan(h, t);
    const Limb cm = mpn::add_n<Limb>(sm, m0, m1);
    const Limb cb = mpn::add_n<Limb>(sb, b0, b1);

    std::array<Limb, 2 * t + 1> w1;
    std::array<Limb, 2 * t> winf;
    mpn::mul_with_carry_digits<Limb>(w1, sb, cb, sm, cm, sub_mul);
    sub_mul(winf, b1, m1);

    std::array<Limb, 2 * h> w0;
    negated_low<Limb, N>(w0, a);
    std::array<Limb, h> l0;
    mpn::sub_n<Limb>(l0, std::span<const Limb>(w1).first(h), std::span<const Limb>(winf).first(h));
    mpn::sub_n<Limb>(l0, l0, std::span<const Limb>(w0).first(h));
    mpn::sub_n<Limb>(std::span<Limb>(w0).subspan(h), std::span<const Limb>(w0).subspan(h), l0);

    // linear term w1 - w0 - winf, exact
    mpn::sub_from<Limb>(std::span<Limb>(w1), std::span<const Limb>(w0));
    mpn::sub_from<Limb>(std::span<Limb>(w1), std::span<const Limb>(winf));

    std::array<Limb, 2 * N + 4> bm{};
    std::copy(w0.begin(), w0.end(), bm.begin());
    mpn::add_into<Limb>(std::span<Limb>(bm).subspan(h), std::span<const Limb>(w1));
    mpn::add_into<Limb>(std::span<Limb>(bm).subspan(2 * h), std::span<const Limb>(winf));
    return redc_finish<Limb, N>(a, bm);
  }
}

/// Toom-3 bm with 4 sub-products at 1, -1, 2 and infinity. The linear term
/// c1 = (6 w1 - 2 w(-1) - w2 + 12 winf - 3 w0) / 6 needs w0 one bit beyond
/// B^h, so residues are carried mod 2^(h bits + 1): first c1 mod 2 from the
/// low two bits, then w0 mod 2B from -a, then c1 mod B via an exact halving
/// and a multiply by 3^-1 mod B^h.
template <LimbWord Limb, std::size_t N>
FixedNat<Limb, N> redc_split3_kernel(const MontCtx<Limb, N>& ctx, const FixedNat<Limb, 2 * N>& a,
                                     MulCounter* counter) {
  constexpr std::size_t h = split_part_limbs<N>(3);
  if constexpr (h == 0 || 2 * h > N) {
    throw ConfigError("split REDC with k=3 needs at least two limbs");
  } else {
    constexpr std::size_t len = 2 * h + 2;
    const MulConfig cfg = mul_config_for(RedcStrategy::opt_split_k3);
    const FixedNat<Limb, N> b = redc_quotient(ctx, a, cfg, counter);
    auto sub_mul = [&](std::span<Limb> out, std::span<const Limb> x, std::span<const Limb> y) {
      mpn::mul_toom3_n<Limb>(out, x, y, cfg.toom3_threshold, counter);
    };

    std::array<Limb, 3 * h> mp{}, bp{};
    std::copy_n(ctx.modulus().limbs().begin(), N, mp.begin());
    std::copy_n(b.limbs().begin(), N, bp.begin());
    mpn::Toom3Eval<Limb> em, eb;
    mpn::toom3_evaluate<Limb>(mp, em);
    mpn::toom3_evaluate<Limb>(bp, eb);

    std::array<Limb, len> w0{}, w1{}, wm{}, w2{}, w4{};
    mpn::mul_with_carry_digits<Limb>(std::span<Limb>(w1).first(2 * h + 1), std::span<const Limb>(eb.one.data(), h),
                                     eb.c_one, std::span<const Limb>(em.one.data(), h), em.c_one, sub_mul);
    mpn::mul_with_carry_digits<Limb>(std::span<Limb>(wm).first(2 * h + 1),
                                     std::span<const Limb>(eb.minus.data(), h), eb.c_minus,
                                     std::span<const Limb>(em.minus.data(), h), em.c_minus, sub_mul);
    mpn::mul_with_carry_digits<Limb>(std::span<Limb>(w2).first(2 * h + 1), std::span<const Limb>(eb.two.data(), h),
                                     eb.c_two, std::span<const Limb>(em.two.data(), h), em.c_two, sub_mul);
    sub_mul(std::span<Limb>(w4).first(2 * h), std::span<const Limb>(bp).subspan(2 * h, h),
            std::span<const Limb>(mp).subspan(2 * h, h));
    const bool wm_negative = em.minus_negative != eb.minus_negative;

    // T = -a mod B^2h equals w0 + c1 B^h mod B^2h
    std::array<Limb, 2 * h> target;
    negated_low<Limb, N>(target, a);

    // K = 6 w1 - 2 w(-1) - w2 + 12 winf, mod B^(h+1)
    std::array<Limb, h + 1> k{}, tmp;
    const auto low = [](const std::array<Limb, len>& w) { return std::span<const Limb>(w).first(h + 1); };
    mpn::mul_1<Limb>(k, low(w1), 6);
    mpn::mul_1<Limb>(tmp, low(wm), 2);
    if (wm_negative) {
      mpn::add_n<Limb>(k, k, tmp);
    } else {
      mpn::sub_n<Limb>(k, k, tmp);
    }
    mpn::sub_n<Limb>(k, k, low(w2));
    mpn::mul_1<Limb>(tmp, low(w4), 12);
    mpn::add_n<Limb>(k, k, tmp);

    // c1 mod 2 from (K - 3 T) mod 4, since w0 = T (mod 4)
    const Limb c1_bit = static_cast<Limb>(((k[0] - 3u * target[0]) >> 1) & 1u);

    // w0 mod 2B = (T - (c1 mod 2) B) mod 2B, held in h + 1 limbs
    std::array<Limb, h + 1> w0_2b{};
    std::copy_n(target.begin(), h + (2 * h > h ? 1 : 0), w0_2b.begin());
    w0_2b[h] = static_cast<Limb>((w0_2b[h] ^ c1_bit) & 1u);

    // (K - 3 w0) mod 2B = 6 c1 mod 2B
    std::array<Limb, h + 1> num;
    mpn::mul_1<Limb>(tmp, w0_2b, 3);
    mpn::sub_n<Limb>(num, k, tmp);
    num[h] &= 1u;
    std::array<Limb, h> l0;
    mpn::rshift<Limb>(l0, std::span<const Limb>(num).first(h), 1, num[h]);
    mpn::mul_inverse3<Limb>(l0, l0);

    // w0 = T - l0 B^h mod B^2h
    std::copy(target.begin(), target.end(), w0.begin());
    mpn::sub_n<Limb>(std::span<Limb>(w0).subspan(h, h), std::span<const Limb>(w0).subspan(h, h), l0);

    std::array<Limb, len> c1, c2, c3;
    mpn::interpolate_toom3<Limb>(w0, w1, wm, wm_negative, w2, w4, c1, c2, c3);

    std::array<Limb, 6 * h + 4> bm{};
    std::copy_n(w0.begin(), 2 * h, bm.begin());
    mpn::add_into<Limb>(std::span<Limb>(bm).subspan(h), std::span<const Limb>(c1));
    mpn::add_into<Limb>(std::span<Limb>(bm).subspan(2 * h), std::span<const Limb>(c2));
    mpn::add_into<Limb>(std::span<Limb>(bm).subspan(3 * h), std::span<const Limb>(c3));
    mpn::add_into<Limb>(std::span<Limb>(bm).subspan(4 * h), std::span<const Limb>(w4).first(2 * h));
    if constexpr (6 * h + 4 < 2 * N) {
      std::array<Limb, 2 * N> wide{};
      std::copy(bm.begin(), bm.end(), wide.begin());
      return redc_finish<Limb, N>(a, wide);
    } else {
      assert(mpn::is_zero<Limb>(std::span<const Limb>(bm).subspan(2 * N)));
      return redc_finish<Limb, N>(a, bm);
    }
  }
}

template <LimbWord Limb, std::size_t N>
FixedNat<Limb, N> redc_kernel(const MontCtx<Limb, N>& ctx, const FixedNat<Limb, 2 * N>& a, RedcStrategy s,
                              MulCounter* counter) {
  switch (s) {
    case RedcStrategy::classic:
      return redc_classic_kernel(ctx, a, counter);
    case RedcStrategy::opt_schoolbook:
      return redc_opt_schoolbook_kernel(ctx, a, counter);
    case RedcStrategy::opt_split_k2:
      return redc_split2_kernel(ctx, a, counter);
    case RedcStrategy::opt_split_k3:
      return redc_split3_kernel(ctx, a, counter);
  }
  throw ConfigError("unknown REDC strategy");
}

/// a < R R' (high half below R'), the lazy REDC precondition.
template <LimbWord Limb, std::size_t N>
void check_redc_input(const MontCtx<Limb, N>& ctx, const FixedNat<Limb, 2 * N>& a) {
  if constexpr (kVerifyBounds) {
    if (a.bit_length() > FixedNat<Limb, N>::width_bits + ctx.bits()) {
      throw ContractViolation("REDC input must be below R * R'");
    }
  }
}

constexpr int bound_rank(Bound b) noexcept { return static_cast<int>(b); }

}  // namespace detail

// ---------------------------------------------------------------------------
// REDC entry points. Results are lazy: no final subtraction, value < 2R'.

template <LimbWord Limb, std::size_t N>
LazyResidue<Limb, N> redc_classic(const MontCtx<Limb, N>& ctx, const FixedNat<Limb, 2 * N>& a,
                                  MulCounter* counter = nullptr) {
  detail::check_redc_input(ctx, a);
  return detail::make_residue(ctx, detail::redc_classic_kernel(ctx, a, counter), Bound::lt_2rp);
}

template <LimbWord Limb, std::size_t N>
LazyResidue<Limb, N> redc_opt_schoolbook(const MontCtx<Limb, N>& ctx, const FixedNat<Limb, 2 * N>& a,
                                         MulCounter* counter = nullptr) {
  detail::check_redc_input(ctx, a);
  return detail::make_residue(ctx, detail::redc_opt_schoolbook_kernel(ctx, a, counter), Bound::lt_2rp);
}

/// k in {2, 3}: bm from 2k - 2 sub-multiplications instead of 2k - 1.
template <LimbWord Limb, std::size_t N>
LazyResidue<Limb, N> redc_opt_split(const MontCtx<Limb, N>& ctx, const FixedNat<Limb, 2 * N>& a, int k,
                                    MulCounter* counter = nullptr) {
  if (k != 2 && k != 3) throw ConfigError("redc_opt_split supports k = 2 or k = 3");
  detail::check_redc_input(ctx, a);
  const auto r = k == 2 ? detail::redc_split2_kernel(ctx, a, counter) : detail::redc_split3_kernel(ctx, a, counter);
  return detail::make_residue(ctx, r, Bound::lt_2rp);
}

template <LimbWord Limb, std::size_t N>
LazyResidue<Limb, N> redc(const MontCtx<Limb, N>& ctx, const FixedNat<Limb, 2 * N>& a, RedcStrategy s,
                          MulCounter* counter = nullptr) {
  detail::check_redc_input(ctx, a);
  return detail::make_residue(ctx, detail::redc_kernel(ctx, a, s, counter), Bound::lt_2rp);
}

// ---------------------------------------------------------------------------
// Branch-free conditional reductions

/// a mod m for 0 <= a < 2m (or a mod 2m-range for a < 4m with use_two_m):
/// a' = a - m is always computed and the borrow bit selects.
template <LimbWord Limb, std::size_t N>
FixedNat<Limb, N> cond_sub_after_add(const MontCtx<Limb, N>& ctx, const FixedNat<Limb, N>& a, bool use_two_m = false,
                                     MulCounter* counter = nullptr) {
  const FixedNat<Limb, N>& sub_m = use_two_m ? ctx.two_m() : ctx.modulus();
  if constexpr (kVerifyBounds) {
    const FixedNat<Limb, N>& limit = use_two_m ? ctx.four_m() : ctx.two_m();
    if (a >= limit) throw ContractViolation("cond_sub_after_add: input out of range");
  }
  const SubResult<Limb, N> d = sub(a, sub_m);
  const Limb keep = static_cast<Limb>(Limb{0} - static_cast<Limb>(d.borrow));
  FixedNat<Limb, N> r;
  mpn::select<Limb>(r.limbs(), keep, a.limbs(), d.diff.limbs());
  if (counter) counter->cond_reductions += 1;
  return r;
}

/// Non-negative representative of a signed difference in [-m, m) (or
/// [-2m, 2m) with use_two_m): a + m (or a + 2m) is always computed and the
/// sign (borrow) bit selects.
template <LimbWord Limb, std::size_t N>
FixedNat<Limb, N> cond_add_after_sub(const MontCtx<Limb, N>& ctx, const SubResult<Limb, N>& a, bool use_two_m = false,
                                     MulCounter* counter = nullptr) {
  const FixedNat<Limb, N>& add_m = use_two_m ? ctx.two_m() : ctx.modulus();
  const AddResult<Limb, N> s = add(a.diff, add_m);
  if constexpr (kVerifyBounds) {
    if (a.borrow ? !(s.carry || s.sum.is_zero()) : a.diff >= add_m) {
      throw ContractViolation("cond_add_after_sub: input out of range");
    }
  }
  const Limb negative = static_cast<Limb>(Limb{0} - static_cast<Limb>(a.borrow));
  FixedNat<Limb, N> r;
  mpn::select<Limb>(r.limbs(), negative, s.sum.limbs(), a.diff.limbs());
  if (counter) counter->cond_reductions += 1;
  return r;
}

// ---------------------------------------------------------------------------
// Montgomery arithmetic

/// Output class of mont_mul under the reduction lemma. Both operands below
/// 2m give < 2m (needs R > 4m); below 2R' give < R' + m < 2R'; below 3R'
/// give < (13/4)R'. Anything looser is outside the lemma.
inline Bound product_bound(Bound x, Bound y) {
  const int worst = std::max(detail::bound_rank(x), detail::bound_rank(y));
  if (worst <= detail::bound_rank(Bound::lt_2m)) return Bound::lt_2m;
  if (worst <= detail::bound_rank(Bound::lt_2rp)) return Bound::lt_2rp;
  if (worst <= detail::bound_rank(Bound::lt_3rp)) return Bound::lt_13_4rp;
  throw ContractViolation("mont_mul: operand bound (13/4)R' is outside the reduction lemma");
}

/// x y R^-1 (mod m), no final subtraction.
template <LimbWord Limb, std::size_t N>
LazyResidue<Limb, N> mont_mul(const MontCtx<Limb, N>& ctx, const LazyResidue<Limb, N>& x,
                              const LazyResidue<Limb, N>& y, RedcStrategy s = RedcStrategy::classic,
                              MulCounter* counter = nullptr) {
  const Bound out = product_bound(x.bound, y.bound);
  if constexpr (kVerifyBounds) {
    detail::make_residue(ctx, x.value, x.bound);
    detail::make_residue(ctx, y.value, y.bound);
  }
  const FixedNat<Limb, 2 * N> prod = mul_full(x.value, y.value, mul_config_for(s), counter);
  if (counter) counter->mulmods += 1;
  return detail::make_residue(ctx, detail::redc_kernel(ctx, prod, s, counter), out);
}

template <LimbWord Limb, std::size_t N>
LazyResidue<Limb, N> to_mont(const MontCtx<Limb, N>& ctx, const FixedNat<Limb, N>& x, MulCounter* counter = nullptr) {
  if (x >= ctx.modulus()) throw ContractViolation("to_mont: input must be below the modulus");
  const FixedNat<Limb, N> r = detail::redc_classic_kernel(ctx, mul_schoolbook(x, ctx.r2(), counter), counter);
  return {cond_sub_after_add(ctx, r, false, counter), Bound::canonical};
}

/// Reduces any lazy class to [0, m) with a cascade of selects.
template <LimbWord Limb, std::size_t N>
LazyResidue<Limb, N> canonicalize(const MontCtx<Limb, N>& ctx, const LazyResidue<Limb, N>& x,
                                  MulCounter* counter = nullptr) {
  FixedNat<Limb, N> v = x.value;
  switch (x.bound) {
    case Bound::canonical:
      return x;
    case Bound::lt_2rp:
    case Bound::lt_3rp:
    case Bound::lt_13_4rp: {  // all below 8m since m >= R'/2
      const SubResult<Limb, N> d = sub(v, ctx.four_m());
      const Limb keep = static_cast<Limb>(Limb{0} - static_cast<Limb>(d.borrow));
      mpn::select<Limb>(v.limbs(), keep, v.limbs(), d.diff.limbs());
      if (counter) counter->cond_reductions += 1;
      v = cond_sub_after_add(ctx, v, true, counter);
      [[fallthrough]];
    }
    case Bound::lt_2m:
      v = cond_sub_after_add(ctx, v, false, counter);
  }
  return {v, Bound::canonical};
}

template <LimbWord Limb, std::size_t N>
FixedNat<Limb, N> from_mont(const MontCtx<Limb, N>& ctx, const LazyResidue<Limb, N>& x, MulCounter* counter = nullptr) {
  if constexpr (kVerifyBounds) detail::make_residue(ctx, x.value, x.bound);
  // x < R, so (x + bm) / R <= m
  const FixedNat<Limb, N> r = detail::redc_classic_kernel(ctx, x.value.template resized<2 * N>(), counter);
  return cond_sub_after_add(ctx, r, false, counter);
}

// ---------------------------------------------------------------------------
// Add/sub/mul under a reduction discipline

struct KernelConfig {
  RedcStrategy strategy = RedcStrategy::classic;
  ReductionMode mode = ReductionMode::lazy;
};

template <LimbWord Limb, std::size_t N>
void require_mode_bound(const LazyResidue<Limb, N>& x, ReductionMode mode, const char* op) {
  const Bound allowed = mode == ReductionMode::eager ? Bound::canonical : Bound::lt_2m;
  if (detail::bound_rank(x.bound) > detail::bound_rank(allowed)) {
    throw ContractViolation(std::string(op) + ": operand bound " + std::string(to_string(x.bound)) +
                            " not allowed in this reduction mode");
  }
}

template <LimbWord Limb, std::size_t N>
LazyResidue<Limb, N> mod_add(const MontCtx<Limb, N>& ctx, const LazyResidue<Limb, N>& x, const LazyResidue<Limb, N>& y,
                             ReductionMode mode, MulCounter* counter = nullptr) {
  require_mode_bound(x, mode, "mod_add");
  require_mode_bound(y, mode, "mod_add");
  const bool lazy = mode == ReductionMode::lazy;
  const FixedNat<Limb, N> s = add(x.value, y.value).sum;  // < 4m < R
  if (counter) counter->adds += 1;
  return detail::make_residue(ctx, cond_sub_after_add(ctx, s, lazy, counter), lazy ? Bound::lt_2m : Bound::canonical);
}

template <LimbWord Limb, std::size_t N>
LazyResidue<Limb, N> mod_sub(const MontCtx<Limb, N>& ctx, const LazyResidue<Limb, N>& x, const LazyResidue<Limb, N>& y,
                             ReductionMode mode, MulCounter* counter = nullptr) {
  require_mode_bound(x, mode, "mod_sub");
  require_mode_bound(y, mode, "mod_sub");
  const bool lazy = mode == ReductionMode::lazy;
  if (counter) counter->adds += 1;
  return detail::make_residue(ctx, cond_add_after_sub(ctx, sub(x.value, y.value), lazy, counter),
                              lazy ? Bound::lt_2m : Bound::canonical);
}

/// Eager mode canonicalises the product with one more select; lazy mode
/// leaves it below 2m.
template <LimbWord Limb, std::size_t N>
LazyResidue<Limb, N> mod_mul(const MontCtx<Limb, N>& ctx, const LazyResidue<Limb, N>& x, const LazyResidue<Limb, N>& y,
                             const KernelConfig& cfg, MulCounter* counter = nullptr) {
  require_mode_bound(x, cfg.mode, "mod_mul");
  require_mode_bound(y, cfg.mode, "mod_mul");
  LazyResidue<Limb, N> p = mont_mul(ctx, x, y, cfg.strategy, counter);
  if (cfg.mode == ReductionMode::eager) {
    p = {cond_sub_after_add(ctx, p.value, false, counter), Bound::canonical};
  }
  return p;
}

}  // namespace modarith
