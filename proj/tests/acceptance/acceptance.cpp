// Acceptance run: one PASS/FAIL line per criterion, every tolerance pinned
// below. Exit status is the number of failed criteria.

#include <array>
#include <boost/multiprecision/miller_rabin.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "commands.hpp"
#include "modarith/batch.hpp"
#include "modarith/tables.hpp"
#include "support/group_law.hpp"
#include "support/oracle.hpp"
#include "support/suyama_oracle.hpp"

using namespace modarith;
using modarith::testing::cpp_int;
using modarith::testing::from_int;
using modarith::testing::random_below;
using modarith::testing::random_odd_modulus;
using modarith::testing::to_int;

namespace {

// pinned limits
constexpr int kOracleTriples = 100000;
constexpr int kTriplesPerModulus = 16;
constexpr double kOracleSeconds = 60.0;
constexpr double kHighProductTolerance = 0.05;
constexpr int kSplitInputs = 10000;
constexpr int kLemmaTrials = 100000;
constexpr double kGroupLawSeconds = 10.0;
constexpr int kSemiprimes = 100;
constexpr int kSemiprimesRequired = 90;
constexpr std::size_t kCurvesPerSemiprime = 50;
constexpr std::uint64_t kSemiprimeB1 = 8192;
constexpr double kEcmSeconds = 300.0;
constexpr double kCensusRatio = 0.65;
constexpr std::size_t kBatchItems = 256;
constexpr std::uint64_t kBatchB1 = 2048;
// B1 = 18 on 143: sigma = 4 makes u = sigma^2 - 5 vanish modulo 11 only
constexpr std::uint64_t kSigma143 = 4;

constexpr std::array<RedcStrategy, 4> kAll{RedcStrategy::classic, RedcStrategy::opt_schoolbook,
                                           RedcStrategy::opt_split_k2, RedcStrategy::opt_split_k3};

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

cpp_int inverse_mod(cpp_int a, const cpp_int& m) {
  cpp_int r0 = m, r1 = a % m, s0 = 0, s1 = 1;
  while (r1 != 0) {
    const cpp_int q = r0 / r1;
    cpp_int t = r0 - q * r1;
    r0 = r1;
    r1 = t;
    t = s0 - q * s1;
    s0 = s1;
    s1 = t;
  }
  return ((s0 % m) + m) % m;
}

// 1. ---------------------------------------------------------------------

template <std::size_t N>
std::uint64_t oracle_width(std::size_t bits, std::uint64_t seed) {
  using Nat = FixedNat<std::uint64_t, N>;
  std::mt19937_64 rng(seed);
  std::uint64_t mismatches = 0;
  MontCtx<std::uint64_t, N> ctx;
  cpp_int m, rinv;
  for (int i = 0; i < kOracleTriples; ++i) {
    if (i % kTriplesPerModulus == 0) {
      ctx = mont_setup(random_odd_modulus<Nat>(rng, bits));
      m = to_int(ctx.modulus());
      rinv = inverse_mod((cpp_int(1) << Nat::width_bits) % m, m);
    }
    const cpp_int x = random_below(rng, m), y = random_below(rng, m);
    const cpp_int want = x * y % m;
    const cpp_int want_raw = want * rinv % m;
    const LazyResidue<std::uint64_t, N> xr{from_int<Nat>(x), Bound::canonical}, yr{from_int<Nat>(y), Bound::canonical};
    const auto xm = to_mont(ctx, xr.value), ym = to_mont(ctx, yr.value);
    for (RedcStrategy s : kAll) {
      // raw: x y R^-1; through Montgomery form: x y
      const bool raw = to_int(canonicalize(ctx, mont_mul(ctx, xr, yr, s)).value) == want_raw;
      const bool roundtrip = to_int(from_mont(ctx, mont_mul(ctx, xm, ym, s))) == want;
      mismatches += !(raw && roundtrip);
    }
  }
  return mismatches;
}

Verdict criterion_oracle() {
  const auto t0 = Clock::now();
  const std::uint64_t bad = oracle_width<2>(64, 101) + oracle_width<3>(128, 102) + oracle_width<4>(254, 103);
  const double secs = since(t0);
  return {bad == 0 && secs < kOracleSeconds,
          fmt("64/128/254-bit widths x %d triples x 4 strategies, %llu mismatches, %.1f s (limit %.0f s)",
              kOracleTriples, static_cast<unsigned long long>(bad), secs, kOracleSeconds)};
}

// 2. ---------------------------------------------------------------------

Verdict criterion_split_table() {
  struct Row {
    const char* name;
    double alpha;
    const char* rho;
    const char* c;
  };
  const Row rows[] = {{"Schoolbook", 2.0, "0.500", "0.500"},
                      {"Karatsuba-Ofman", std::log2(3.0), "0.694", "0.808"},
                      {"Toom-Cook-3", std::log(5.0) / std::log(3.0), "0.775", "0.888"},
                      {"Toom-Cook-4", std::log(7.0) / std::log(4.0), "0.820", "0.923"}};
  bool ok = true;
  std::string got;
  for (const Row& r : rows) {
    const RhoProfile p = optimal_rho(r.alpha);
    const std::string rho = fmt("%.3f", p.rho_hat), c = fmt("%.3f", p.c_rho);
    ok = ok && rho == r.rho && c == r.c;
    got += " " + rho + "|" + c;
  }
  return {ok, "rho_hat|C_rho =" + got};
}

// 3. ---------------------------------------------------------------------

Verdict criterion_cost_table() {
  std::ostringstream out, err;
  cli::Options opt;
  opt.format = cli::Format::jsonl;
  const int status = cli::cmd_tables(opt, out, err);
  const double want[] = {3.0 / 4.0, 2.0 / 3.0, 4.0 / 5.0, 6.0 / 7.0};
  const char* text[] = {"0.750", "0.667", "0.800", "0.857"};
  std::istringstream in(out.str());
  std::size_t i = 0;
  bool ok = status == cli::kOk;
  std::string got;
  for (std::string line; std::getline(in, line);) {
    const auto rec = nlohmann::json::parse(line);
    if (rec["table"] != "high_product") continue;
    const double c = rec["c_hat"];
    ok = ok && i < 4 && c == want[i] && fmt("%.3f", c) == text[i];
    got += " " + fmt("%.3f", c);
    ++i;
  }
  // the text rendering carries the same digits
  std::ostringstream txt;
  cli::cmd_tables(cli::Options{}, txt, err);
  for (const char* t : text) ok = ok && txt.str().find(t) != std::string::npos;
  return {ok && i == 4, "C_hat =" + got};
}

// 4. ---------------------------------------------------------------------

template <std::size_t N>
Verdict high_product_at() {
  using Nat = FixedNat<std::uint64_t, N>;
  std::mt19937_64 rng(400 + N);
  const auto ctx = mont_setup(random_odd_modulus<Nat>(rng, Nat::width_bits - 2));
  const auto a = from_int<FixedNat<std::uint64_t, 2 * N>>(
      random_below(rng, cpp_int(1) << (Nat::width_bits + ctx.bits())));
  MulCounter low, classic, opt, full, half;
  detail::redc_quotient(ctx, a, MulConfig{}, &low);
  const auto r_classic = redc_classic(ctx, a, &classic);
  const auto r_opt = redc_opt_schoolbook(ctx, a, &opt);
  mul_schoolbook(Nat{}, Nat{}, &full);
  mul_schoolbook(FixedNat<std::uint64_t, N / 2>{}, FixedNat<std::uint64_t, N / 2>{}, &half);
  const double bm_opt = static_cast<double>(opt.submuls - low.submuls) / static_cast<double>(half.submuls);
  const double bm_classic = static_cast<double>(classic.submuls - low.submuls) / static_cast<double>(half.submuls);
  const double rel = static_cast<double>(opt.submuls) / (1.25 * static_cast<double>(full.submuls));
  const bool ok = r_opt == r_classic && bm_opt == 3.0 && bm_classic == 4.0 && std::abs(rel - 1.0) <= kHighProductTolerance;
  return {ok, fmt("%zu bits: b*m %.0f vs %.0f half products, total %llu limb products = %.4f x 1.25 M(n)",
                  Nat::width_bits, bm_opt, bm_classic, static_cast<unsigned long long>(opt.submuls), rel)};
}

Verdict criterion_high_product() {
  const Verdict a = high_product_at<32>(), b = high_product_at<64>();
  return {a.pass && b.pass, a.detail + "; " + b.detail + fmt(" (tolerance %.0f%%)", kHighProductTolerance * 100)};
}

// 5. ---------------------------------------------------------------------

/// Sub-multiplications of the b*m step, in units of one part-size product.
template <std::size_t N>
double split_submuls(int k) {
  using Nat = FixedNat<std::uint64_t, N>;
  std::mt19937_64 rng(500 + N);
  const auto ctx = mont_setup(random_odd_modulus<Nat>(rng, Nat::width_bits - 2));
  const auto a = from_int<FixedNat<std::uint64_t, 2 * N>>(
      random_below(rng, cpp_int(1) << (Nat::width_bits + ctx.bits())));
  const RedcStrategy s = k == 2 ? RedcStrategy::opt_split_k2 : RedcStrategy::opt_split_k3;
  const MulConfig cfg = mul_config_for(s);
  MulCounter low, total, part;
  detail::redc_quotient(ctx, a, cfg, &low);
  redc_opt_split(ctx, a, k, &total);
  constexpr std::size_t h2 = detail::split_part_limbs<N>(2), h3 = detail::split_part_limbs<N>(3);
  if (k == 2) {
    mul_full(FixedNat<std::uint64_t, h2>{}, FixedNat<std::uint64_t, h2>{}, cfg, &part);
  } else {
    mul_full(FixedNat<std::uint64_t, h3>{}, FixedNat<std::uint64_t, h3>{}, cfg, &part);
  }
  return static_cast<double>(total.submuls - low.submuls) / static_cast<double>(part.submuls);
}

template <std::size_t N>
std::uint64_t split_mismatches(int k, std::uint64_t seed) {
  using Nat = FixedNat<std::uint64_t, N>;
  std::mt19937_64 rng(seed);
  std::uint64_t bad = 0;
  MontCtx<std::uint64_t, N> ctx;
  for (int i = 0; i < kSplitInputs; ++i) {
    if (i % kTriplesPerModulus == 0) ctx = mont_setup(random_odd_modulus<Nat>(rng, Nat::width_bits - 2 - rng() % 16));
    const auto a = from_int<FixedNat<std::uint64_t, 2 * N>>(
        random_below(rng, cpp_int(1) << (Nat::width_bits + ctx.bits())));
    bad += !(redc_opt_split(ctx, a, k) == redc_classic(ctx, a));
  }
  return bad;
}

Verdict criterion_split() {
  // leaf level (one limb per part) and one recursion above it
  const double k2[] = {split_submuls<2>(2), split_submuls<16>(2)};
  const double k3[] = {split_submuls<3>(3), split_submuls<27>(3)};
  std::uint64_t bad = 0;
  for (int k : {2, 3}) {
    bad += split_mismatches<4>(k, 510 + k) + split_mismatches<3>(k, 520 + k) + split_mismatches<8>(k, 530 + k);
  }
  const bool ok = k2[0] == 2 && k2[1] == 2 && k3[0] == 4 && k3[1] == 4 && bad == 0;
  return {ok, fmt("b*m sub-multiplications k=2: %.0f, %.0f (want 2); k=3: %.0f, %.0f (want 4); "
                  "%d inputs per k at 3 widths vs classic: %llu differ",
                  k2[0], k2[1], k3[0], k3[1], kSplitInputs, static_cast<unsigned long long>(bad))};
}

// 6. ---------------------------------------------------------------------

template <std::size_t N>
std::uint64_t lemma_width(std::size_t bits, std::uint64_t seed, std::uint64_t& trials) {
  using Nat = FixedNat<std::uint64_t, N>;
  std::mt19937_64 rng(seed);
  std::uint64_t bad = 0;
  MontCtx<std::uint64_t, N> ctx;
  cpp_int m, rinv, rp;
  for (int i = 0; i < kLemmaTrials; ++i) {
    if (i % kTriplesPerModulus == 0) {
      ctx = mont_setup(random_odd_modulus<Nat>(rng, bits));
      m = to_int(ctx.modulus());
      rinv = inverse_mod((cpp_int(1) << Nat::width_bits) % m, m);
      rp = cpp_int(1) << ctx.bits();
    }
    const bool wide = i % 2 == 1;
    const Bound in = wide ? Bound::lt_3rp : Bound::lt_2rp;
    const cpp_int lim = wide ? cpp_int(3 * rp) : cpp_int(2 * rp), out_lim = wide ? cpp_int(13 * rp / 4) : cpp_int(2 * rp);
    const cpp_int x = random_below(rng, lim), y = random_below(rng, lim);
    const RedcStrategy s = kAll[static_cast<std::size_t>(i) % 4];
    const auto p = mont_mul(ctx, {from_int<Nat>(x), in}, {from_int<Nat>(y), in}, s);
    const cpp_int v = to_int(p.value);
    ++trials;
    bad += !(v < out_lim && v % m == x * y % m * rinv % m);
  }
  return bad;
}

std::uint64_t lemma_exhaustive_8bit(std::uint64_t& trials) {
  using Nat = FixedNat<std::uint8_t, 2>;
  std::uint64_t bad = 0;
  for (std::uint64_t m = 3; m < 64; m += 2) {
    const auto ctx = mont_setup(Nat::from_u64(m));
    const std::uint64_t rp = std::uint64_t{1} << ctx.bits();
    const auto rinv = static_cast<std::uint64_t>(inverse_mod(65536 % m, m));
    for (std::uint64_t x = 0; x < 3 * rp; ++x) {
      for (std::uint64_t y = 0; y < 3 * rp; ++y) {
        const bool small = x < 2 * rp && y < 2 * rp;
        const Bound in = small ? Bound::lt_2rp : Bound::lt_3rp;
        const std::uint64_t out_lim = small ? 2 * rp : 13 * rp / 4;
        for (RedcStrategy s : kAll) {
          const std::uint64_t v = mont_mul(ctx, {Nat::from_u64(x), in}, {Nat::from_u64(y), in}, s).value.low_u64();
          ++trials;
          bad += !(v < out_lim && v % m == x * y % m * rinv % m);
        }
      }
    }
  }
  return bad;
}

Verdict criterion_lemma() {
  std::uint64_t wide_trials = 0, small_trials = 0;
  const std::uint64_t bad = lemma_width<2>(64, 601, wide_trials) + lemma_width<3>(128, 602, wide_trials) +
                            lemma_width<4>(254, 603, wide_trials);
  const std::uint64_t bad_small = lemma_exhaustive_8bit(small_trials);
  return {bad == 0 && bad_small == 0,
          fmt("%llu random trials at 64/128/254 bits, %llu exhaustive 8-bit-limb cases, %llu violations",
              static_cast<unsigned long long>(wide_trials), static_cast<unsigned long long>(small_trials),
              static_cast<unsigned long long>(bad + bad_small))};
}

// 7. ---------------------------------------------------------------------

Verdict criterion_group_law() {
  const auto t0 = Clock::now();
  std::uint64_t checks = 0, bad = 0;
  for (RedcStrategy s : kAll) {
    for (ReductionMode mode : {ReductionMode::eager, ReductionMode::lazy}) {
      const auto t = testing::check_group_law_f101({s, mode});
      checks += t.checks;
      bad += t.mismatches;
    }
  }
  const double secs = since(t0);
  return {bad == 0 && checks > 0 && secs < kGroupLawSeconds,
          fmt("%llu double/diffadd/ladder checks (s <= 50, 4 strategies x 2 modes), %llu mismatches, %.2f s "
              "(limit %.0f s)",
              static_cast<unsigned long long>(checks), static_cast<unsigned long long>(bad), secs,
              kGroupLawSeconds)};
}

// 8. ---------------------------------------------------------------------

Verdict criterion_ecm() {
  const auto t0 = Clock::now();
  // (a)
  const std::array<std::int64_t, 2> primes{11, 13};
  const PrimePowerPlan plan18 = stage1_plan(18);
  const auto predicted = testing::predicted_gcd(primes, kSigma143, plan18.factors);
  const auto r143 = stage1(FixedNat<std::uint64_t, 1>::from_u64(143), 18, kSigma143);
  const bool a_ok = predicted && (*predicted == 11 || *predicted == 13) && r143.outcome == Outcome::factor_found &&
                    r143.factor.low_u64() == *predicted && 143 % r143.factor.low_u64() == 0;

  // (b) p prime in [2^19, 2^20], q a 128-bit prime, n in 4 limbs as the CLI would use
  using Nat = FixedNat<std::uint64_t, 4>;
  std::mt19937_64 rng(801);
  boost::random::mt19937 mr_rng(802);
  int found = 0, confirmed = 0;
  std::size_t curves = 0;
  for (int i = 0; i < kSemiprimes; ++i) {
    std::uint64_t p;
    do {
      p = (std::uint64_t{1} << 19) + rng() % (std::uint64_t{1} << 19);
    } while (!boost::multiprecision::miller_rabin_test(cpp_int(p), 25, mr_rng));
    cpp_int q;
    do {
      q = (cpp_int(rng()) << 64 | rng()) | (cpp_int(1) << 127) | 1;
    } while (!boost::multiprecision::miller_rabin_test(q, 25, mr_rng));
    const cpp_int n = q * p;
    const auto r = factor(from_int<Nat>(n), kSemiprimeB1, kCurvesPerSemiprime, 900 + static_cast<std::uint64_t>(i),
                          {RedcStrategy::opt_schoolbook, ReductionMode::lazy});
    curves += r.curves_tried;
    if (r.outcome != Outcome::factor_found) continue;
    ++found;
    // trial division of n by the reported factor
    const cpp_int f = to_int(r.factor);
    confirmed += f > 1 && f < n && n % f == 0;
  }
  const double secs = since(t0);
  const bool b_ok = found >= kSemiprimesRequired && confirmed == found && secs < kEcmSeconds;
  return {a_ok && b_ok,
          fmt("(a) 143, B1=18, sigma=%llu -> %llu (oracle %llu); (b) %d/%d semiprimes split (need %d), %d/%d factors "
              "confirmed, %zu curves, %.1f s (limit %.0f s)",
              static_cast<unsigned long long>(kSigma143), static_cast<unsigned long long>(r143.factor.low_u64()),
              static_cast<unsigned long long>(predicted.value_or(0)), found, kSemiprimes, kSemiprimesRequired,
              confirmed, found, curves, secs, kEcmSeconds)};
}

// 9. ---------------------------------------------------------------------

Verdict criterion_census() {
  using Nat = FixedNat<std::uint64_t, 4>;
  BatchJob<std::uint64_t, 4> job;
  std::mt19937_64 rng(901);
  job.n = random_odd_modulus<Nat>(rng, 254);
  job.sigmas = sigma_sequence(1, 8);
  job.lanes = 8;
  const CensusResult base = reduction_op_census(job, false);
  const CensusResult opt = reduction_op_census(job, true);
  const double ratio = static_cast<double>(opt.per_iteration) / static_cast<double>(base.per_iteration);

  std::ostringstream out, err;
  cli::Options bench;
  bench.compare = true;
  bench.format = cli::Format::jsonl;
  const int status = cli::cmd_bench(bench, out, err);
  double speed = 0, b_rate = 0, o_rate = 0;
  std::istringstream in(out.str());
  for (std::string line; std::getline(in, line);) {
    const auto rec = nlohmann::json::parse(line);
    if (rec["role"] == "comparison") speed = rec["ratio"];
    if (rec["role"] == "baseline") b_rate = rec["mulmod_per_sec"];
    if (rec["role"] == "optimized") o_rate = rec["mulmod_per_sec"];
  }
  const bool ok = base.uniform && opt.uniform && ratio <= kCensusRatio && status == cli::kOk && speed >= 1.0;
  return {ok, fmt("cond_reductions per ladder iteration %llu -> %llu (ratio %.3f, limit %.2f); bench %.3g -> %.3g "
                  "MulMod/s, optimized/baseline %.3f (need >= 1)",
                  static_cast<unsigned long long>(base.per_iteration),
                  static_cast<unsigned long long>(opt.per_iteration), ratio, kCensusRatio, b_rate, o_rate, speed)};
}

// 10. --------------------------------------------------------------------

Verdict criterion_batch() {
  using Nat = FixedNat<std::uint64_t, 4>;
  BatchJob<std::uint64_t, 4> job;
  std::mt19937_64 rng(1001);
  // a 46-bit prime times a 200-bit cofactor
  const Nat cofactor = random_odd_modulus<Nat>(rng, 200);
  job.n = mul_low(cofactor, Nat::from_u64(70368744177467ull), Nat::width_bits, 1.0);
  job.b1 = kBatchB1;
  job.sigmas = sigma_sequence(1002, kBatchItems);
  job.lanes = 8;
  job.cfg = {RedcStrategy::opt_schoolbook, ReductionMode::lazy};
  job.parallelism = 1;
  const auto serial = run_batch(job);
  job.parallelism = 8;
  const auto parallel = run_batch(job);
  std::size_t differ = 0, factors = 0;
  for (std::size_t i = 0; i < kBatchItems; ++i) {
    differ += !(serial.items[i] == parallel.items[i]);
    factors += serial.items[i].outcome == Outcome::factor_found;
  }
  const bool ok = serial.items.size() == kBatchItems && parallel.items.size() == kBatchItems && differ == 0 &&
                  serial.counters == parallel.counters;
  return {ok, fmt("%zu items, B1=%llu, parallelism 1 vs 8: %zu items differ (%zu with a factor)", kBatchItems,
                  static_cast<unsigned long long>(kBatchB1), differ, factors)};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Verdict()>> criteria[] = {
      {"oracle equivalence", criterion_oracle},
      {"optimal split table", criterion_split_table},
      {"high-product table", criterion_cost_table},
      {"schoolbook REDC in 1.25 M(n)", criterion_high_product},
      {"split REDC with 2k-2 products", criterion_split},
      {"reduction lemma bounds", criterion_lemma},
      {"group law over F_101", criterion_group_law},
      {"end-to-end ECM", criterion_ecm},
      {"lazy reduction census", criterion_census},
      {"batch determinism", criterion_batch},
  };
  int failed = 0, index = 0;
  for (const auto& [name, run] : criteria) {
    ++index;
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << "  " << index << ". " << name << ": " << v.detail << std::endl;
  }
  std::cout << (10 - failed) << "/10 criteria passed" << std::endl;
  return failed;
}
