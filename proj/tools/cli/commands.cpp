#include "commands.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <random>
#include <type_traits>

#include "modarith/batch.hpp"
#include "modarith/tables.hpp"

namespace modarith::cli {
namespace {

using json = nlohmann::json;
using Limb = std::uint64_t;
constexpr std::size_t kWideLimbs = 8;

std::string trim_hex(const std::string& hex) {
  const std::size_t first = hex.find_first_not_of('0');
  return first == std::string::npos ? "0" : hex.substr(first);
}

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

/// Calls f(std::integral_constant<size_t, N>) with the smallest supported
/// limb count leaving two bits of headroom above `bits`.
template <class F>
decltype(auto) with_width(std::size_t bits, F&& f) {
  if (bits + 2 <= 2 * 64) return f(std::integral_constant<std::size_t, 2>{});
  if (bits + 2 <= 4 * 64) return f(std::integral_constant<std::size_t, 4>{});
  if (bits + 2 <= 8 * 64) return f(std::integral_constant<std::size_t, 8>{});
  throw WidthError("modulus of " + std::to_string(bits) + " bits exceeds the 510-bit capacity");
}

std::size_t hex_bits(const std::string& hex) {
  return FixedNat<Limb, kWideLimbs>::from_hex(hex).bit_length();
}

ReductionMode parse_mode(const std::string& mode) {
  if (mode == "eager") return ReductionMode::eager;
  if (mode == "lazy") return ReductionMode::lazy;
  throw ConfigError("unknown reduction mode '" + mode + "'");
}

std::string_view mode_name(ReductionMode m) { return m == ReductionMode::eager ? "eager" : "lazy"; }

void emit(std::ostream& out, const json& j) { out << j.dump() << '\n'; }

// ---------------------------------------------------------------------------
// factor

template <std::size_t N>
int factor_at_width(const Options& opt, std::ostream& out) {
  using Nat = FixedNat<Limb, N>;
  const Nat n = Nat::from_hex(opt.n_hex);
  check_composite_candidate(n);
  if (opt.curves == 0) throw ConfigError("--curves must be at least 1");
  const KernelConfig cfg{parse_strategy(opt.strategy), parse_mode(opt.mode)};
  const std::vector<std::uint64_t> sigmas = sigma_sequence(opt.seed, opt.curves);

  // Curves run in chunks of lanes x parallelism; the lowest-index factor wins.
  const std::size_t chunk = opt.lanes * opt.parallelism;
  std::optional<StageResult<Limb, N>> found;
  std::size_t found_index = 0, curves_run = 0;
  MulCounter total;
  for (std::size_t first = 0; first < sigmas.size() && !found; first += chunk) {
    BatchJob<Limb, N> job;
    job.n = n;
    job.b1 = opt.b1;
    job.sigmas.assign(sigmas.begin() + static_cast<std::ptrdiff_t>(first),
                      sigmas.begin() + static_cast<std::ptrdiff_t>(std::min(first + chunk, sigmas.size())));
    job.lanes = opt.lanes;
    job.parallelism = opt.parallelism;
    job.cfg = cfg;
    const BatchReport<Limb, N> report = run_batch(job);
    total += report.counters;
    curves_run += job.sigmas.size();
    for (std::size_t i = 0; i < report.items.size(); ++i) {
      if (report.items[i].outcome == Outcome::factor_found) {
        found = report.items[i];
        found_index = first + i;
        break;
      }
    }
  }

  const std::string n_hex = trim_hex(n.to_hex());
  if (opt.format == Format::jsonl) {
    json j{{"command", "factor"}, {"n", n_hex},           {"bits", n.bit_length()},
           {"b1", opt.b1},        {"curves_run", curves_run}, {"mulmods", total.mulmods},
           {"strategy", opt.strategy}, {"mode", opt.mode}};
    if (found) {
      j["outcome"] = "factor_found";
      j["factor"] = trim_hex(found->factor.to_hex());
      j["cofactor"] = trim_hex(div_rem(n, found->factor).quotient.to_hex());
      j["sigma"] = found->sigma;
      j["curve"] = found_index + 1;
    } else {
      j["outcome"] = "no_factor";
    }
    emit(out, j);
  } else {
    out << "n = " << n_hex << " (" << n.bit_length() << " bits), B1 = " << opt.b1 << '\n';
    if (found) {
      out << "factor " << trim_hex(found->factor.to_hex()) << " found on curve " << found_index + 1
          << " (sigma = " << found->sigma << ")\n";
      out << "cofactor " << trim_hex(div_rem(n, found->factor).quotient.to_hex()) << '\n';
    } else {
      out << "no factor found in " << curves_run << " curves\n";
    }
    out << "curves run " << curves_run << ", mulmods " << total.mulmods << '\n';
  }
  return found ? kOk : kNoFactor;
}

// ---------------------------------------------------------------------------
// bench

FixedNat<Limb, 4> default_bench_modulus(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  FixedNat<Limb, 4> n;
  for (std::size_t i = 0; i < 4; ++i) n.limb(i) = rng();
  n.limb(3) = (n.limb(3) & ((Limb{1} << 62) - 1)) | (Limb{1} << 61);  // exactly 254 bits
  n.limb(0) |= 1u;
  return n;
}

json sample_json(const ThroughputSample& t, const KernelConfig& cfg, std::string_view role) {
  return {{"command", "bench"},
          {"role", role},
          {"strategy", to_string(cfg.strategy)},
          {"mode", mode_name(cfg.mode)},
          {"bits", t.bits},
          {"mulmods", t.mulmods},
          {"seconds", t.seconds},
          {"mulmod_per_sec", t.mulmods_per_sec},
          {"mulmod_per_sec_scaled_192", t.scaled_192}};
}

void print_sample(std::ostream& out, const ThroughputSample& t, const KernelConfig& cfg, std::string_view role) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-9s %-15s %-5s %4zu bits  %12.4g MulMod/s  %12.4g scaled to 192 bits  (%.2f s)\n",
                std::string(role).c_str(), std::string(to_string(cfg.strategy)).c_str(),
                std::string(mode_name(cfg.mode)).c_str(), t.bits, t.mulmods_per_sec, t.scaled_192, t.seconds);
  out << buf;
}

constexpr int kCompareSlices = 10;

void best_of(ThroughputSample& acc, const ThroughputSample& t) {
  const bool better = t.mulmods_per_sec > acc.mulmods_per_sec;
  const std::uint64_t mulmods = acc.mulmods + t.mulmods;
  const double seconds = acc.seconds + t.seconds;
  if (better) acc = t;
  acc.mulmods = mulmods;
  acc.seconds = seconds;
}

template <std::size_t N>
int bench_at_width(const Options& opt, const FixedNat<Limb, N>& n, std::ostream& out) {
  if (!n.is_odd()) throw InvalidModulus("n must be odd");
  if (opt.lanes == 0) throw ConfigError("--lanes must be at least 1");
  const MontCtx<Limb, N> ctx = mont_setup(n);
  const std::vector<std::uint64_t> sigmas = sigma_sequence(opt.seed, opt.lanes);
  const double window = std::max(opt.window_seconds, kMinWindowSeconds);
  const KernelConfig chosen{parse_strategy(opt.strategy), parse_mode(opt.mode)};

  if (!opt.compare) {
    const ThroughputSample t = measure_throughput(ctx, sigmas, chosen, window);
    if (opt.format == Format::jsonl) {
      emit(out, sample_json(t, chosen, "single"));
    } else {
      print_sample(out, t, chosen, "single");
    }
    return kOk;
  }

  const KernelConfig baseline{RedcStrategy::classic, ReductionMode::eager};
  const KernelConfig optimized{chosen.strategy, ReductionMode::lazy};
  // alternating slices, best slice per kernel: a shared CPU slows one
  // long window at a time, rarely every slice of one side
  ThroughputSample b, o;
  for (int i = 0; i < kCompareSlices; ++i) {
    best_of(b, measure_throughput(ctx, sigmas, baseline, window / kCompareSlices));
    best_of(o, measure_throughput(ctx, sigmas, optimized, window / kCompareSlices));
  }
  const double ratio = o.mulmods_per_sec / b.mulmods_per_sec;
  if (opt.format == Format::jsonl) {
    emit(out, sample_json(b, baseline, "baseline"));
    emit(out, sample_json(o, optimized, "optimized"));
    emit(out, json{{"command", "bench"}, {"role", "comparison"}, {"ratio", ratio}});
  } else {
    print_sample(out, b, baseline, "baseline");
    print_sample(out, o, optimized, "optimized");
    out << "optimized / baseline = " << fixed3(ratio) << '\n';
  }
  return kOk;
}

}  // namespace

int cmd_factor(const Options& opt, std::ostream& out, std::ostream&) {
  return with_width(hex_bits(opt.n_hex), [&](auto width) { return factor_at_width<decltype(width)::value>(opt, out); });
}

int cmd_bench(const Options& opt, std::ostream& out, std::ostream&) {
  if (opt.n_hex.empty()) return bench_at_width<4>(opt, default_bench_modulus(opt.seed), out);
  return with_width(hex_bits(opt.n_hex), [&](auto width) {
    return bench_at_width<decltype(width)::value>(opt, FixedNat<Limb, decltype(width)::value>::from_hex(opt.n_hex), out);
  });
}

int cmd_tables(const Options& opt, std::ostream& out, std::ostream&) {
  const auto split = split_table();
  const auto high = high_product_table();
  if (opt.format == Format::jsonl) {
    for (const auto& r : split) {
      emit(out, {{"table", "split"},
                 {"algorithm", r.algorithm},
                 {"complexity", r.complexity},
                 {"alpha", r.alpha},
                 {"rho_hat", r.rho_hat},
                 {"c_rho", r.c_rho}});
    }
    for (const auto& r : high) {
      emit(out, {{"table", "high_product"},
                 {"algorithm", r.algorithm},
                 {"c_rho", r.c_rho},
                 {"subproducts", r.subproducts},
                 {"full_subproducts", r.full_subproducts},
                 {"c_hat", r.c_hat}});
    }
    return kOk;
  }
  char buf[160];
  out << "Optimal split of the low-half product\n";
  std::snprintf(buf, sizeof buf, "%-16s %-12s %8s %8s\n", "algorithm", "complexity", "rho_hat", "C_rho");
  out << buf;
  for (const auto& r : split) {
    std::snprintf(buf, sizeof buf, "%-16s %-12s %8.3f %8.3f\n", r.algorithm.c_str(), r.complexity.c_str(),
                  r.rho_hat, r.c_rho);
    out << buf;
  }
  out << "\nHigh product b*m in the optimised REDC\n";
  std::snprintf(buf, sizeof buf, "%-16s %8s %12s %8s\n", "algorithm", "C_rho", "subproducts", "C_hat");
  out << buf;
  for (const auto& r : high) {
    const std::string frac = std::to_string(r.subproducts) + "/" + std::to_string(r.full_subproducts);
    std::snprintf(buf, sizeof buf, "%-16s %8.3f %12s %8.3f\n", r.algorithm.c_str(), r.c_rho, frac.c_str(), r.c_hat);
    out << buf;
  }
  return kOk;
}

int cmd_selftest(const Options& opt, std::ostream& out, std::ostream&) {
  SelftestOptions st;
  st.seed = opt.seed;
  if (!opt.fault.empty()) {
    if (opt.fault != "corrupt-mprime") throw ConfigError("unknown fault '" + opt.fault + "'");
    st.corrupt_m_prime = true;
  }
  const std::vector<SuiteResult> suites = run_selftest(st);
  std::size_t passed = 0;
  for (const auto& s : suites) {
    passed += s.passed ? 1 : 0;
    if (opt.format == Format::jsonl) {
      emit(out, {{"suite", s.name},
                 {"passed", s.passed},
                 {"cases", s.cases},
                 {"failures", s.failures},
                 {"samples", s.samples},
                 {"seconds", s.seconds}});
      continue;
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s %-20s %9llu cases %6llu failures  %.2f s\n", s.passed ? "PASS" : "FAIL",
                  s.name.c_str(), static_cast<unsigned long long>(s.cases),
                  static_cast<unsigned long long>(s.failures), s.seconds);
    out << buf;
    for (const auto& line : s.samples) out << "    " << line << '\n';
  }
  if (opt.format == Format::text) out << passed << '/' << suites.size() << " suites passed\n";
  return passed == suites.size() ? kOk : kSelftestFailed;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fixed-width Montgomery arithmetic and ECM stage 1", "modarith"};
  app.require_subcommand(1);
  Options opt;
  std::string format = "text";

  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "jsonl"}));
  };
  auto add_kernel = [&](CLI::App* sub) {
    sub->add_option("--strategy", opt.strategy, "REDC strategy")
        ->check(CLI::IsMember({"classic", "opt-schoolbook", "opt-k2", "opt-k3"}));
    sub->add_option("--mode", opt.mode, "Reduction discipline")->check(CLI::IsMember({"eager", "lazy"}));
    sub->add_option("--seed", opt.seed, "Seed for sigma values and generated inputs");
    sub->add_option("--lanes", opt.lanes, "Curves per lockstep group")->check(CLI::PositiveNumber);
  };

  CLI::App* factor = app.add_subcommand("factor", "Run ECM stage 1 on curves until a factor appears");
  factor->add_option("--n", opt.n_hex, "Composite to factor, hex")->required();
  factor->add_option("--b1", opt.b1, "Stage-1 bound")->check(CLI::Range(std::uint64_t{2}, std::uint64_t{1} << 32));
  factor->add_option("--curves", opt.curves, "Maximum number of curves")->check(CLI::PositiveNumber);
  factor->add_option("--parallelism", opt.parallelism, "Worker threads")->check(CLI::PositiveNumber);
  add_kernel(factor);
  add_format(factor);

  CLI::App* bench = app.add_subcommand("bench", "Measure modular multiplications per second");
  bench->add_option("--n", opt.n_hex, "Modulus, hex (default: a seeded 254-bit odd number)");
  bench->add_flag("--compare", opt.compare, "Compare eager classic REDC with the lazy chosen strategy");
  bench->add_option("--window", opt.window_seconds, "Seconds per measurement (at least 0.1)");
  add_kernel(bench);
  add_format(bench);

  CLI::App* tables = app.add_subcommand("tables", "Print the low-half split and high-product cost tables");
  add_format(tables);

  CLI::App* selftest = app.add_subcommand("selftest", "Run the built-in verification suites");
  selftest->add_option("--seed", opt.seed, "Seed for random cases");
  selftest->add_option("--fault", opt.fault, "Inject a fault")->check(CLI::IsMember({"corrupt-mprime"}));
  add_format(selftest);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }
  opt.format = format == "jsonl" ? Format::jsonl : Format::text;

  try {
    if (*factor) return cmd_factor(opt, out, err);
    if (*bench) return cmd_bench(opt, out, err);
    if (*tables) return cmd_tables(opt, out, err);
    return cmd_selftest(opt, out, err);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const ContractViolation& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
}

}  // namespace modarith::cli
