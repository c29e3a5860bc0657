#pragma once

#include <array>
#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "modarith/counter.hpp"
#include "modarith/detail/mpn.hpp"
#include "modarith/errors.hpp"

namespace modarith {

/// Fixed-width unsigned integer stored as N little-endian limbs. Every
/// operation has a stated output width; nothing truncates silently.
template <LimbWord Limb, std::size_t N>
class FixedNat {
  static_assert(N >= 1 && N <= 2 * kMaxLimbs, "unsupported limb count");

 public:
  using limb_type = Limb;
  static constexpr std::size_t limb_count = N;
  static constexpr std::size_t width_bits = N * limb_bits<Limb>;

  constexpr FixedNat() noexcept = default;

  static constexpr FixedNat from_u64(std::uint64_t v) {
    FixedNat r;
    for (std::size_t i = 0; i < N && v != 0; ++i) {
      r.limbs_[i] = static_cast<Limb>(v);
      v = limb_bits<Limb> >= 64 ? 0 : v >> (limb_bits<Limb> % 64);
    }
    if (v != 0) throw ContractViolation("FixedNat::from_u64: value exceeds width");
    return r;
  }

  static constexpr FixedNat from_limbs(std::span<const Limb> limbs) {
    if (limbs.size() != N) throw ContractViolation("FixedNat::from_limbs: limb count mismatch");
    FixedNat r;
    std::copy(limbs.begin(), limbs.end(), r.limbs_.begin());
    return r;
  }

  static constexpr FixedNat power_of_two(std::size_t e) {
    if (e >= width_bits) throw ContractViolation("FixedNat::power_of_two: exponent exceeds width");
    FixedNat r;
    r.limbs_[e / limb_bits<Limb>] = static_cast<Limb>(Limb{1} << (e % limb_bits<Limb>));
    return r;
  }

  /// Big-endian hex digits, no prefix, either case. Leading zeros are allowed.
  static FixedNat from_hex(std::string_view hex) {
    if (hex.empty()) throw ParseError("empty hex string");
    FixedNat r;
    std::size_t bit = 0;
    for (auto it = hex.rbegin(); it != hex.rend(); ++it, bit += 4) {
      const int d = hex_digit(*it);
      if (d < 0) throw ParseError("invalid hex digit '" + std::string(1, *it) + "'");
      if (d == 0) continue;
      if (bit >= width_bits) throw ParseError("hex value exceeds " + std::to_string(width_bits) + " bits");
      r.limbs_[bit / limb_bits<Limb>] |= static_cast<Limb>(Limb(d) << (bit % limb_bits<Limb>));
    }
    return r;
  }

  /// Lowercase, zero-padded to width_bits / 4 digits.
  std::string to_hex() const {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(width_bits / 4);
    for (std::size_t i = N; i-- > 0;) {
      for (int shift = static_cast<int>(limb_bits<Limb>) - 4; shift >= 0; shift -= 4) {
        out.push_back(kDigits[(limbs_[i] >> shift) & 0xf]);
      }
    }
    return out;
  }

  constexpr std::span<Limb, N> limbs() noexcept { return limbs_; }
  constexpr std::span<const Limb, N> limbs() const noexcept { return limbs_; }
  constexpr Limb limb(std::size_t i) const noexcept { return limbs_[i]; }
  constexpr Limb& limb(std::size_t i) noexcept { return limbs_[i]; }

  constexpr bool bit(std::size_t i) const noexcept {
    return ((limbs_[i / limb_bits<Limb>] >> (i % limb_bits<Limb>)) & 1u) != 0;
  }

  constexpr std::size_t bit_length() const noexcept {
    for (std::size_t i = N; i-- > 0;) {
      if (limbs_[i] != 0) return i * limb_bits<Limb> + std::bit_width(limbs_[i]);
    }
    return 0;
  }

  constexpr bool is_zero() const noexcept { return mpn::is_zero<Limb>(limbs_); }
  constexpr bool is_odd() const noexcept { return (limbs_[0] & 1u) != 0; }

  /// Low 64 bits of the value.
  constexpr std::uint64_t low_u64() const noexcept {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < N && i * limb_bits<Limb> < 64; ++i) {
      v |= static_cast<std::uint64_t>(limbs_[i]) << (i * limb_bits<Limb>);
    }
    return v;
  }

  /// Zero-extends, or truncates to the low M limbs.
  template <std::size_t M>
  constexpr FixedNat<Limb, M> resized() const noexcept {
    FixedNat<Limb, M> r;
    for (std::size_t i = 0; i < std::min(N, M); ++i) r.limb(i) = limbs_[i];
    return r;
  }

  /// (value << k) mod 2^width_bits.
  constexpr FixedNat shl(std::size_t k) const noexcept {
    FixedNat r;
    if (k >= width_bits) return r;
    const std::size_t ls = k / limb_bits<Limb>;
    const unsigned bs = k % limb_bits<Limb>;
    for (std::size_t i = N; i-- > ls;) {
      Limb v = static_cast<Limb>(limbs_[i - ls] << bs);
      if (bs != 0 && i - ls > 0) v |= static_cast<Limb>(limbs_[i - ls - 1] >> (limb_bits<Limb> - bs));
      r.limbs_[i] = v;
    }
    return r;
  }

  constexpr FixedNat shr(std::size_t k) const noexcept {
    FixedNat r;
    if (k >= width_bits) return r;
    const std::size_t ls = k / limb_bits<Limb>;
    const unsigned bs = k % limb_bits<Limb>;
    for (std::size_t i = 0; i + ls < N; ++i) {
      Limb v = static_cast<Limb>(limbs_[i + ls] >> bs);
      if (bs != 0 && i + ls + 1 < N) v |= static_cast<Limb>(limbs_[i + ls + 1] << (limb_bits<Limb> - bs));
      r.limbs_[i] = v;
    }
    return r;
  }

  /// value mod 2^k.
  constexpr FixedNat low_bits(std::size_t k) const noexcept {
    FixedNat r = *this;
    for (std::size_t i = 0; i < N; ++i) {
      const std::size_t lo = i * limb_bits<Limb>;
      if (lo >= k) {
        r.limbs_[i] = 0;
      } else if (k - lo < limb_bits<Limb>) {
        r.limbs_[i] &= static_cast<Limb>((Limb{1} << (k - lo)) - 1u);
      }
    }
    return r;
  }

  friend constexpr bool operator==(const FixedNat&, const FixedNat&) = default;
  friend constexpr std::strong_ordering operator<=>(const FixedNat& a, const FixedNat& b) noexcept {
    const int c = mpn::cmp<Limb>(a.limbs_, b.limbs_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

 private:
  static constexpr int hex_digit(char c) noexcept {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  }

  std::array<Limb, N> limbs_{};
};

template <LimbWord Limb, std::size_t N>
struct AddResult {
  FixedNat<Limb, N> sum;
  bool carry = false;
};

/// diff holds a - b modulo 2^width; borrow set means the true value is
/// diff - 2^width (a two's-complement view of a signed difference).
template <LimbWord Limb, std::size_t N>
struct SubResult {
  FixedNat<Limb, N> diff;
  bool borrow = false;
};

template <LimbWord Limb, std::size_t N>
constexpr AddResult<Limb, N> add(const FixedNat<Limb, N>& a, const FixedNat<Limb, N>& b) noexcept {
  AddResult<Limb, N> r;
  r.carry = mpn::add_n<Limb>(r.sum.limbs(), a.limbs(), b.limbs()) != 0;
  return r;
}

template <LimbWord Limb, std::size_t N>
constexpr SubResult<Limb, N> sub(const FixedNat<Limb, N>& a, const FixedNat<Limb, N>& b) noexcept {
  SubResult<Limb, N> r;
  r.borrow = mpn::sub_n<Limb>(r.diff.limbs(), a.limbs(), b.limbs()) != 0;
  return r;
}

template <LimbWord Limb, std::size_t N>
constexpr std::strong_ordering cmp(const FixedNat<Limb, N>& a, const FixedNat<Limb, N>& b) noexcept {
  return a <=> b;
}

template <LimbWord Limb, std::size_t N>
FixedNat<Limb, 2 * N> mul_schoolbook(const FixedNat<Limb, N>& a, const FixedNat<Limb, N>& b,
                                     MulCounter* counter = nullptr) noexcept {
  FixedNat<Limb, 2 * N> r;
  mpn::mul_basecase<Limb>(r.limbs(), a.limbs(), b.limbs(), counter);
  return r;
}

template <LimbWord Limb, std::size_t N>
FixedNat<Limb, 2 * N> mul_karatsuba(const FixedNat<Limb, N>& a, const FixedNat<Limb, N>& b,
                                    std::size_t threshold = MulConfig{}.karatsuba_threshold,
                                    MulCounter* counter = nullptr) {
  static_assert(N <= kMaxLimbs);
  if (threshold < 1) throw ConfigError("mul_karatsuba: threshold must be at least one limb");
  FixedNat<Limb, 2 * N> r;
  mpn::mul_karatsuba_n<Limb>(r.limbs(), a.limbs(), b.limbs(), threshold, counter);
  return r;
}

template <LimbWord Limb, std::size_t N>
FixedNat<Limb, 2 * N> mul_toom3(const FixedNat<Limb, N>& a, const FixedNat<Limb, N>& b,
                                std::size_t threshold = MulConfig{}.toom3_threshold,
                                MulCounter* counter = nullptr) {
  static_assert(N <= kMaxLimbs);
  if (threshold < 1) throw ConfigError("mul_toom3: threshold must be at least one limb");
  FixedNat<Limb, 2 * N> r;
  mpn::mul_toom3_n<Limb>(r.limbs(), a.limbs(), b.limbs(), threshold, counter);
  return r;
}

template <LimbWord Limb, std::size_t N>
FixedNat<Limb, 2 * N> mul_full(const FixedNat<Limb, N>& a, const FixedNat<Limb, N>& b,
                               const MulConfig& cfg, MulCounter* counter = nullptr) {
  static_assert(N <= kMaxLimbs);
  FixedNat<Limb, 2 * N> r;
  mpn::mul_full_n<Limb>(r.limbs(), a.limbs(), b.limbs(), cfg, counter);
  return r;
}

template <LimbWord Limb, std::size_t N>
struct DivResult {
  FixedNat<Limb, N> quotient;
  FixedNat<Limb, N> remainder;
};

/// Bitwise restoring division. Setup-time only: contexts and conversions.
template <LimbWord Limb, std::size_t N>
constexpr DivResult<Limb, N> div_rem(const FixedNat<Limb, N>& a, const FixedNat<Limb, N>& d) {
  if (d.is_zero()) throw ContractViolation("div_rem: division by zero");
  DivResult<Limb, N> r;
  for (std::size_t i = a.bit_length(); i-- > 0;) {
    // remainder < d, so doubling it can carry out of the top limb
    const bool top = r.remainder.bit(FixedNat<Limb, N>::width_bits - 1);
    r.remainder = r.remainder.shl(1);
    if (a.bit(i)) r.remainder.limb(0) |= 1u;
    if (top || r.remainder >= d) {
      r.remainder = sub(r.remainder, d).diff;
      r.quotient.limb(i / limb_bits<Limb>) |= static_cast<Limb>(Limb{1} << (i % limb_bits<Limb>));
    }
  }
  return r;
}

/// Binary gcd; gcd(0, b) == b.
template <LimbWord Limb, std::size_t N>
constexpr FixedNat<Limb, N> gcd(FixedNat<Limb, N> a, FixedNat<Limb, N> b) noexcept {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  std::size_t shift = 0;
  while (!a.is_odd() && !b.is_odd()) {
    a = a.shr(1);
    b = b.shr(1);
    ++shift;
  }
  while (!a.is_odd()) a = a.shr(1);
  while (!b.is_zero()) {
    while (!b.is_odd()) b = b.shr(1);
    if (a > b) std::swap(a, b);
    b = sub(b, a).diff;
  }
  return a.shl(shift);
}

}  // namespace modarith
