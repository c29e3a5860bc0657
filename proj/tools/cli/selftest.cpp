#include <chrono>
#include <random>
#include <sstream>

#include "affine_curve.hpp"
#include "commands.hpp"
#include "modarith/batch.hpp"

namespace modarith::cli {
namespace {

__extension__ using u128 = unsigned __int128;

constexpr std::size_t kMaxSamples = 5;
constexpr RedcStrategy kStrategies[] = {RedcStrategy::classic, RedcStrategy::opt_schoolbook,
                                        RedcStrategy::opt_split_k2, RedcStrategy::opt_split_k3};

class Suite {
 public:
  explicit Suite(std::string name) : start_(std::chrono::steady_clock::now()) { result_.name = std::move(name); }

  void check(bool ok, const std::string& what) {
    ++result_.cases;
    if (ok) return;
    ++result_.failures;
    result_.passed = false;
    if (result_.samples.size() < kMaxSamples) result_.samples.push_back(what);
  }

  template <class F>
  void guarded(F&& f, const std::string& what) {
    try {
      f();
    } catch (const std::exception& e) {
      check(false, what + ": " + e.what());
    }
  }

  SuiteResult finish() {
    result_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    return result_;
  }

 private:
  SuiteResult result_;
  std::chrono::steady_clock::time_point start_;
};

// 32-bit limbs, two of them: R = 2^64 and moduli below 2^62, so a 128-bit
// integer is an exact oracle.
using Nat64 = FixedNat<std::uint32_t, 2>;

Nat64 nat(std::uint64_t v) { return Nat64::from_u64(v); }

std::uint64_t random_odd_modulus(std::mt19937_64& rng) {
  const unsigned bits = 2 + static_cast<unsigned>(rng() % 61);  // 2..62 bits
  std::uint64_t m = rng() & ((std::uint64_t{1} << bits) - 1);
  m |= std::uint64_t{1} << (bits - 1);
  m |= 1u;
  return m < 3 ? 3 : m;
}

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

std::string hex64(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << v;
  return s.str();
}

SuiteResult oracle_equivalence(std::uint64_t seed) {
  Suite suite("oracle_equivalence");
  std::mt19937_64 rng(seed);
  for (int round = 0; round < 2000; ++round) {
    const std::uint64_t m = random_odd_modulus(rng);
    const MontCtx<std::uint32_t, 2> ctx = mont_setup(nat(m));
    for (int i = 0; i < 4; ++i) {
      const std::uint64_t x = rng() % m, y = rng() % m;
      const std::uint64_t want = mulmod(x, y, m);
      for (RedcStrategy s : kStrategies) {
        const std::string what = std::string(to_string(s)) + " m=" + hex64(m) + " x=" + hex64(x) + " y=" + hex64(y);
        suite.guarded(
            [&] {
              const auto p = mont_mul(ctx, to_mont(ctx, nat(x)), to_mont(ctx, nat(y)), s);
              suite.check(from_mont(ctx, p).low_u64() == want, what);
            },
            what);
      }
    }
  }
  return suite.finish();
}

/// Output class and congruence of mont_mul on inputs drawn from the two
/// lemma ranges. A wrong m' breaks the congruence immediately.
SuiteResult lemma_bounds(std::uint64_t seed, bool corrupt) {
  Suite suite("lemma_bounds");
  std::mt19937_64 rng(seed ^ 0x5bd1e995u);
  for (int round = 0; round < 2000; ++round) {
    const std::uint64_t m = random_odd_modulus(rng);
    MontCtx<std::uint32_t, 2> ctx = mont_setup(nat(m));
    if (corrupt) ctx = ctx.with_corrupted_m_prime();
    const std::size_t n = ctx.bits();
    const std::uint64_t r_mod_m = static_cast<std::uint64_t>((static_cast<u128>(1) << 64) % m);
    const std::uint64_t rp = std::uint64_t{1} << n;
    struct Case {
      Bound in;
      std::uint64_t limit;
      Bound out;
    };
    for (const Case& c : {Case{Bound::lt_2rp, 2 * rp, Bound::lt_2rp}, Case{Bound::lt_3rp, 3 * rp, Bound::lt_13_4rp}}) {
      for (int i = 0; i < 4; ++i) {
        const std::uint64_t x = rng() % c.limit, y = rng() % c.limit;
        for (RedcStrategy s : kStrategies) {
          const std::string what = std::string(to_string(s)) + " m=" + hex64(m) + " x=" + hex64(x) +
                                   " y=" + hex64(y) + " in=" + std::string(to_string(c.in));
          suite.guarded(
              [&] {
                const auto p = mont_mul(ctx, {nat(x), c.in}, {nat(y), c.in}, s);
                const std::uint64_t v = p.value.low_u64();
                const bool bounded = p.bound == c.out && ctx.satisfies(p.value, c.out);
                // v R = x y (mod m)
                const bool congruent = mulmod(v % m, r_mod_m, m) == mulmod(x % m, y % m, m);
                suite.check(bounded && congruent, what + " -> " + hex64(v));
              },
              what);
        }
      }
    }
  }
  return suite.finish();
}

SuiteResult counters(std::uint64_t seed) {
  Suite suite("counters");
  {
    MulCounter c;
    mul_karatsuba(FixedNat<std::uint64_t, 2>::from_u64(7), FixedNat<std::uint64_t, 2>::from_u64(9), 1, &c);
    suite.check(c.submuls == 3, "karatsuba on two limbs uses 3 limb products, got " + std::to_string(c.submuls));
  }
  {
    MulCounter c;
    mul_toom3(FixedNat<std::uint64_t, 3>::from_u64(7), FixedNat<std::uint64_t, 3>::from_u64(9), 1, &c);
    suite.check(c.submuls == 5, "toom-3 on three limbs uses 5 limb products, got " + std::to_string(c.submuls));
  }
  {
    // b*m of the high product: total minus the shared low product
    using Nat = FixedNat<std::uint64_t, 8>;
    std::mt19937_64 rng(seed);
    Nat m;
    for (std::size_t i = 0; i < 8; ++i) m.limb(i) = rng();
    m.limb(7) >>= 3;
    m.limb(0) |= 1u;
    const MontCtx<std::uint64_t, 8> ctx = mont_setup(m);
    FixedNat<std::uint64_t, 16> a;
    for (std::size_t i = 0; i < 15; ++i) a.limb(i) = rng();
    const double rho_sb = default_rho(MulKind::schoolbook);
    MulCounter low;
    mul_low(a.resized<8>(), ctx.m_prime(), Nat::width_bits, rho_sb, &low);
    MulCounter classic, opt;
    const auto r1 = redc_classic(ctx, a, &classic);
    const auto r2 = redc_opt_schoolbook(ctx, a, &opt);
    suite.check(r1 == r2, "opt-schoolbook REDC differs from classic");
    suite.check(classic.submuls - low.submuls == 64 && opt.submuls - low.submuls == 48,
                "b*m limb products classic " + std::to_string(classic.submuls - low.submuls) + " opt " +
                    std::to_string(opt.submuls - low.submuls) + ", want 64 and 48");
  }
  {
    // lockstep: every fused ladder iteration does the same work
    using Nat = FixedNat<std::uint64_t, 4>;
    const Nat n = Nat::from_hex("2f9a4b3c5d6e7f8091a2b3c4d5e6f708192a3b4c5d6e7f8091a2b3c4d5e6f71");
    const MontCtx<std::uint64_t, 4> ctx = mont_setup(n);
    for (ReductionMode mode : {ReductionMode::eager, ReductionMode::lazy}) {
      const auto setup = curve_from_sigma(ctx, Nat::from_u64(seed % 1000 + 6), {RedcStrategy::classic, mode});
      auto r0 = setup.start, r1 = xz_double(setup.curve, setup.start);
      std::mt19937_64 rng(seed);
      MulCounter first;
      bool uniform = true;
      for (int i = 0; i < 64; ++i) {
        MulCounter c;
        const std::uint64_t mask = 0 - (rng() & 1u);
        cswap(r0, r1, mask);
        ladder_step(setup.curve, r0, r1, setup.start, &c);
        cswap(r0, r1, mask);
        if (i == 0) first = c;
        uniform = uniform && c == first;
      }
      const std::uint64_t want = mode == ReductionMode::eager ? 19 : 8;
      suite.check(uniform && first.cond_reductions == want && first.mulmods == 11,
                  std::string(mode == ReductionMode::eager ? "eager" : "lazy") + " ladder iteration: " +
                      std::to_string(first.cond_reductions) + " reductions, " + std::to_string(first.mulmods) +
                      " mulmods, uniform=" + (uniform ? "yes" : "no"));
    }
  }
  return suite.finish();
}

/// x-only formulas over F_101 against the affine group law, every point.
SuiteResult group_law() {
  Suite suite("group_law_f101");
  const AffineCurve curve(101, 7, 1);
  using Nat = FixedNat<std::uint32_t, 1>;
  const MontCtx<std::uint32_t, 1> ctx = mont_setup(Nat::from_u64(101));
  const auto points = curve.points();

  auto mont = [&](std::int64_t v) { return to_mont(ctx, Nat::from_u64(static_cast<std::uint64_t>(curve.mod(v)))); };
  auto lift = [&](const AffineCurve::Point& p) -> XZPoint<std::uint32_t, 1> {
    if (p.infinity) return xz_neutral(ctx);
    return {mont(p.x), mont(1)};
  };
  // x-coordinate of (X : Z), or -1 for Z = 0
  auto affine_of = [&](const XZPoint<std::uint32_t, 1>& p) -> std::int64_t {
    const auto z = static_cast<std::int64_t>(from_mont(ctx, p.z).low_u64());
    if (z == 0) return -1;
    const auto x = static_cast<std::int64_t>(from_mont(ctx, p.x).low_u64());
    return curve.mul(x, curve.inv(z));
  };
  auto expect = [](const AffineCurve::Point& p) -> std::int64_t { return p.infinity ? -1 : p.x; };

  for (ReductionMode mode : {ReductionMode::eager, ReductionMode::lazy}) {
    const CurveParams<std::uint32_t, 1> params{&ctx, mont(curve.a24()), {RedcStrategy::classic, mode}};
    const std::string tag = mode == ReductionMode::eager ? "eager " : "lazy ";
    for (const auto& p : points) {
      const std::string pname = p.infinity ? "O" : "(" + std::to_string(p.x) + "," + std::to_string(p.y) + ")";
      suite.check(affine_of(xz_double(params, lift(p))) == expect(curve.add(p, p)), tag + "double " + pname);
      for (const auto& q : points) {
        const auto d = curve.add(p, curve.neg(q));
        // x-only addition needs a finite difference with x != 0
        if (p.infinity || q.infinity || d.infinity || d.x == 0) continue;
        suite.check(affine_of(xz_diffadd(params, lift(p), lift(q), lift(d))) == expect(curve.add(p, q)),
                    tag + "diffadd " + pname);
      }
      if (p.infinity || p.x == 0) continue;
      for (std::uint64_t s = 0; s <= 50; ++s) {
        suite.check(affine_of(ladder(params, lift(p), s)) == expect(curve.scalar(s, p)),
                    tag + "ladder " + pname + " s=" + std::to_string(s));
      }
    }
  }
  return suite.finish();
}

}  // namespace

std::vector<SuiteResult> run_selftest(const SelftestOptions& opt) {
  return {oracle_equivalence(opt.seed), lemma_bounds(opt.seed, opt.corrupt_m_prime), counters(opt.seed),
          group_law()};
}

}  // namespace modarith::cli
