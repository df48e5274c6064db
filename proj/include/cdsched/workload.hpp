#pragma once

#include <cstdint>

#include "cdsched/eh_scheduler.hpp"
#include "cdsched/energy_model.hpp"

namespace cdsched {

/// Knobs for the random workload generators. Means set to 0 (or negative)
/// mean "derive from the instance": arrival_mean defaults to
/// deadline / packet_count and harvest_epoch_mean_gap to
/// deadline / (harvest_epoch_count + 1).
struct WorkloadSpec {
  double arrival_mean = 0.0;
  std::size_t harvest_epoch_count = 0;
  double harvest_epoch_mean_gap = 0.0;
  double harvest_amount_mean = 0.0;  ///< joules; 0 = events carry no energy
  std::uint64_t seed = 0;
};

/// Thrown when rejection sampling exhausts its redraw budget.
class GenerationError : public std::runtime_error {
 public:
  explicit GenerationError(const std::string& message)
      : std::runtime_error(message) {}
};

void validate_workload(const WorkloadSpec& spec);

/// Draws the first P-1 gaps i.i.d. exponential and rejects the whole vector
/// whenever their sum reaches the deadline, so the last packet always
/// arrives strictly before it; the auxiliary tail gap absorbs the remainder.
/// Deterministic given spec.seed; at most 10^4 redraws before
/// GenerationError.
ArrivalSequence gen_arrivals(const ProblemInstance& instance,
                             const WorkloadSpec& spec);

/// Draws harvest_epoch_count event times as cumulative exponential gaps
/// (whole-profile rejection if any timestamp reaches the deadline or two
/// coincide) and i.i.d. exponential amounts. The battery is sized to
/// initial charge + total harvest so it never overflows, matching the
/// large-battery assumption baked into the scheduler's analysis. Uses a
/// substream of spec.seed, so pairing with gen_arrivals on the same spec is
/// safe. Deterministic given spec.seed.
HarvestProfile gen_harvest(const ProblemInstance& instance,
                           const WorkloadSpec& spec);

}  // namespace cdsched
