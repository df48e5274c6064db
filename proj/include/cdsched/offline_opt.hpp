#pragma once

#include <vector>

#include "cdsched/energy_model.hpp"

namespace cdsched {

/// One maximal-average block of the offline schedule. Packets with 0-based
/// index in [previous end_index, end_index) all transmit for
/// `group_duration` seconds. Blocks carry strictly decreasing durations and
/// the last block ends at the packet count.
struct GroupBoundary {
  std::size_t end_index = 0;
  double group_duration = 0.0;
};

/// Block decomposition behind the offline optimum: repeatedly take the
/// longest prefix of remaining gaps whose running average is maximal (ties at
/// 1e-12 relative resolve to the longest prefix) and assign that average as
/// the per-packet duration of the block.
std::vector<GroupBoundary> opt_group_boundaries(const ArrivalSequence& arrivals,
                                                const ProblemInstance& instance);

/// Energy-minimal offline schedule. Non-idling (durations sum to the
/// deadline), causal (cumulative durations dominate cumulative gaps), with
/// non-increasing per-packet durations.
Schedule opt_schedule(const ArrivalSequence& arrivals,
                      const ProblemInstance& instance);

/// Replaces the gaps with the offline durations, producing a sequence with
/// non-increasing gaps whose offline energy matches the original and whose
/// online energy never decreases. Idempotent.
ArrivalSequence opt_transform(const ArrivalSequence& arrivals,
                              const ProblemInstance& instance);

/// Independent brute-force check of opt_schedule: exhaustively enumerates
/// causal finish times on a uniform grid of `grid_step` seconds and returns
/// the cheapest feasible plan. Refuses more than 4 packets or grids finer
/// than 10^4 cells per axis; infeasibly short grid durations rank as
/// +infinity instead of aborting the scan.
Schedule opt_oracle(const ArrivalSequence& arrivals,
                    const ProblemInstance& instance, double grid_step);

}  // namespace cdsched
