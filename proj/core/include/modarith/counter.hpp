#pragma once

#include <cstdint>

namespace modarith {

/// Exact operation tally for one computation. Never shared between threads;
/// merge per-thread counters with operator+= after the fact.
struct MulCounter {
  /// Limb-by-limb products inside multiplication leaves (the M(n) unit).
  /// Scaling by the small carry digits of Toom evaluations is not counted.
  std::uint64_t submuls = 0;
  /// Executions of the add/sub-then-select reduction step.
  std::uint64_t cond_reductions = 0;
  /// Modular additions and subtractions.
  std::uint64_t adds = 0;
  /// Montgomery multiplications (one product plus one REDC).
  std::uint64_t mulmods = 0;

  MulCounter& operator+=(const MulCounter& other) noexcept {
    submuls += other.submuls;
    cond_reductions += other.cond_reductions;
    adds += other.adds;
    mulmods += other.mulmods;
    return *this;
  }

  friend bool operator==(const MulCounter&, const MulCounter&) = default;
};

}  // namespace modarith
