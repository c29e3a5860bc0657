#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <thread>
#include <vector>

#include "modarith/ecm.hpp"

namespace modarith {

template <LimbWord Limb, std::size_t N>
struct BatchJob {
  FixedNat<Limb, N> n;
  std::uint64_t b1 = 8192;
  std::vector<std::uint64_t> sigmas;
  std::size_t lanes = 1;
  std::size_t parallelism = 1;
  KernelConfig cfg;
};

template <LimbWord Limb, std::size_t N>
struct BatchReport {
  std::vector<StageResult<Limb, N>> items;  ///< in sigma order
  MulCounter counters;
  double elapsed_seconds = 0;
  double mulmods_per_sec = 0;
  /// Conditional reductions per fused ladder iteration, equal for every lane.
  std::uint64_t cond_reductions_per_iteration = 0;
};

template <LimbWord Limb, std::size_t N>
void validate(const BatchJob<Limb, N>& job) {
  if (job.sigmas.empty()) throw ConfigError("batch needs at least one sigma");
  if (job.lanes == 0) throw ConfigError("batch lanes must be at least 1");
  if (job.parallelism == 0) throw ConfigError("batch parallelism must be at least 1");
  check_composite_candidate(job.n);
}

namespace detail {

/// Runs lanes [first, last) of the job in lockstep: every lane executes the
/// same ladder iteration before any lane moves on. Lanes whose curve setup
/// already ended in a gcd keep computing on a placeholder curve and their
/// result is simply not replaced.
template <LimbWord Limb, std::size_t N>
void run_lane_group(const MontCtx<Limb, N>& ctx, const PrimePowerPlan& plan, const BatchJob<Limb, N>& job,
                    std::size_t first, std::size_t last, std::vector<StageResult<Limb, N>>& out) {
  const std::size_t width = last - first;
  std::vector<CurveSetup<Limb, N>> setups(width);
  std::vector<MulCounter> counters(width);
  std::vector<XZPoint<Limb, N>> r0(width), r1(width), base(width);
  for (std::size_t l = 0; l < width; ++l) {
    setups[l] = curve_from_sigma(ctx, FixedNat<Limb, N>::from_u64(job.sigmas[first + l]), job.cfg, &counters[l]);
    base[l] = setups[l].start;
  }
  for (std::uint64_t q : plan.factors) {
    for (std::size_t l = 0; l < width; ++l) {
      r0[l] = xz_neutral(ctx);
      r1[l] = base[l];
    }
    for (std::size_t i = static_cast<std::size_t>(std::bit_width(q)); i-- > 0;) {
      const Limb mask = static_cast<Limb>(Limb{0} - static_cast<Limb>((q >> i) & 1u));
      for (std::size_t l = 0; l < width; ++l) {
        cswap(r0[l], r1[l], mask);
        ladder_step(setups[l].curve, r0[l], r1[l], base[l], setups[l].ok ? &counters[l] : nullptr);
        cswap(r0[l], r1[l], mask);
      }
    }
    for (std::size_t l = 0; l < width; ++l) base[l] = r0[l];
  }
  for (std::size_t l = 0; l < width; ++l) {
    const std::uint64_t sigma = job.sigmas[first + l];
    StageResult<Limb, N> r = setups[l].ok ? result_from_gcd(residue_gcd(ctx, base[l].z), ctx.modulus(), sigma)
                                          : result_from_gcd(setups[l].blocking_gcd, ctx.modulus(), sigma);
    r.counters = counters[l];
    out[first + l] = r;
  }
}

}  // namespace detail

struct CensusResult {
  std::uint64_t per_iteration = 0;
  /// Every lane and every sampled iteration saw the same count.
  bool uniform = true;
  std::size_t lanes = 0;
  std::size_t iterations = 0;
};

/// Counts conditional reductions in the fused ladder iteration, measured on
/// the job's own curves. Baseline reduces eagerly after every add, sub and
/// mul; optimized keeps residues below 2m.
template <LimbWord Limb, std::size_t N>
CensusResult reduction_op_census(const BatchJob<Limb, N>& job, bool optimized, std::size_t iterations = 64) {
  validate(job);
  const MontCtx<Limb, N> ctx = mont_setup(job.n);
  KernelConfig cfg = job.cfg;
  cfg.mode = optimized ? ReductionMode::lazy : ReductionMode::eager;
  CensusResult census;
  census.lanes = std::min(job.lanes, job.sigmas.size());
  census.iterations = iterations;
  bool first = true;
  for (std::size_t l = 0; l < census.lanes; ++l) {
    CurveSetup<Limb, N> setup = curve_from_sigma(ctx, FixedNat<Limb, N>::from_u64(job.sigmas[l]), cfg);
    XZPoint<Limb, N> r0 = setup.start, r1 = xz_double(setup.curve, setup.start), diff = setup.start;
    for (std::size_t i = 0; i < iterations; ++i) {
      MulCounter c;
      const Limb mask = static_cast<Limb>(Limb{0} - static_cast<Limb>((job.sigmas[l] >> (i % 32)) & 1u));
      cswap(r0, r1, mask);
      ladder_step(setup.curve, r0, r1, diff, &c);
      cswap(r0, r1, mask);
      if (first) {
        census.per_iteration = c.cond_reductions;
        first = false;
      } else if (c.cond_reductions != census.per_iteration) {
        census.uniform = false;
      }
    }
  }
  return census;
}

/// Every sigma is one work item. Items are cut into groups of `lanes`,
/// groups are dealt round-robin to `parallelism` workers, and each worker
/// runs its groups lane-lockstep. Item results depend only on the item.
template <LimbWord Limb, std::size_t N>
BatchReport<Limb, N> run_batch(const BatchJob<Limb, N>& job) {
  validate(job);
  const MontCtx<Limb, N> ctx = mont_setup(job.n);
  const PrimePowerPlan plan = stage1_plan(job.b1);
  BatchReport<Limb, N> report;
  report.items.resize(job.sigmas.size());

  const std::size_t groups = (job.sigmas.size() + job.lanes - 1) / job.lanes;
  const std::size_t workers = std::min(job.parallelism, groups);
  auto worker = [&](std::size_t w) {
    for (std::size_t g = w; g < groups; g += workers) {
      const std::size_t first = g * job.lanes;
      const std::size_t last = std::min(first + job.lanes, job.sigmas.size());
      detail::run_lane_group(ctx, plan, job, first, last, report.items);
    }
  };

  const auto start = std::chrono::steady_clock::now();
  if (workers == 1) {
    worker(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker, w);
  }
  report.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  for (const auto& item : report.items) report.counters += item.counters;
  report.mulmods_per_sec = report.elapsed_seconds > 0
                               ? static_cast<double>(report.counters.mulmods) / report.elapsed_seconds
                               : 0.0;
  report.cond_reductions_per_iteration =
      reduction_op_census(job, job.cfg.mode == ReductionMode::lazy, 4).per_iteration;
  return report;
}

struct ThroughputSample {
  std::uint64_t mulmods = 0;
  double seconds = 0;
  double mulmods_per_sec = 0;
  /// mulmods_per_sec * (bits / 192)^2
  double scaled_192 = 0;
  std::size_t bits = 0;
};

/// Runs fused ladder iterations on `lanes` curves until at least
/// `min_seconds` of wall clock have passed; counts come from the counter.
template <LimbWord Limb, std::size_t N>
ThroughputSample measure_throughput(const MontCtx<Limb, N>& ctx, const std::vector<std::uint64_t>& sigmas,
                                    KernelConfig cfg, double min_seconds) {
  if (sigmas.empty()) throw ConfigError("throughput measurement needs at least one curve");
  min_seconds = std::max(min_seconds, 0.01);
  std::vector<CurveSetup<Limb, N>> setups;
  std::vector<XZPoint<Limb, N>> r0, r1;
  for (std::uint64_t s : sigmas) {
    setups.push_back(curve_from_sigma(ctx, FixedNat<Limb, N>::from_u64(s), cfg));
    r0.push_back(setups.back().start);
    r1.push_back(xz_double(setups.back().curve, setups.back().start));
  }
  MulCounter counter;
  const auto start = std::chrono::steady_clock::now();
  double elapsed = 0;
  std::uint64_t bits = 0x9e3779b97f4a7c15ull;
  while (elapsed < min_seconds) {
    for (int rep = 0; rep < 64; ++rep) {
      const Limb mask = static_cast<Limb>(Limb{0} - static_cast<Limb>(bits & 1u));
      bits = std::rotr(bits, 1);
      for (std::size_t l = 0; l < setups.size(); ++l) {
        cswap(r0[l], r1[l], mask);
        ladder_step(setups[l].curve, r0[l], r1[l], setups[l].start, &counter);
        cswap(r0[l], r1[l], mask);
      }
    }
    elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  ThroughputSample t;
  t.mulmods = counter.mulmods;
  t.seconds = elapsed;
  t.mulmods_per_sec = static_cast<double>(t.mulmods) / elapsed;
  t.bits = ctx.bits();
  const double ratio = static_cast<double>(t.bits) / 192.0;
  t.scaled_192 = t.mulmods_per_sec * ratio * ratio;
  return t;
}

}  // namespace modarith
