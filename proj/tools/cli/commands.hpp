#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace modarith::cli {

enum ExitCode : int { kOk = 0, kInputError = 1, kNoFactor = 2, kSelftestFailed = 3 };

enum class Format { text, jsonl };

struct Options {
  std::string n_hex;
  std::uint64_t b1 = 8192;
  std::size_t curves = 50;
  std::uint64_t seed = 1;
  std::string strategy = "opt-schoolbook";
  std::string mode = "lazy";
  std::size_t lanes = 8;
  std::size_t parallelism = 1;
  Format format = Format::text;
  // bench
  bool compare = false;
  double window_seconds = 1.0;
  // selftest
  std::string fault;
};

/// Shortest window a throughput measurement may use.
inline constexpr double kMinWindowSeconds = 0.1;

int cmd_factor(const Options& opt, std::ostream& out, std::ostream& err);
int cmd_bench(const Options& opt, std::ostream& out, std::ostream& err);
int cmd_tables(const Options& opt, std::ostream& out, std::ostream& err);
int cmd_selftest(const Options& opt, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches; the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

struct SuiteResult {
  std::string name;
  bool passed = true;
  std::uint64_t cases = 0;
  std::uint64_t failures = 0;
  std::vector<std::string> samples;  ///< first few failing cases
  double seconds = 0;
};

struct SelftestOptions {
  std::uint64_t seed = 1;
  /// Flip a bit of m' in the contexts the bound suite uses.
  bool corrupt_m_prime = false;
};

std::vector<SuiteResult> run_selftest(const SelftestOptions& opt);

}  // namespace modarith::cli
