#pragma once

#include <vector>

#include "cdsched/energy_model.hpp"

namespace cdsched {

/// A lump of harvested energy landing in the battery at one instant.
struct HarvestEvent {
  double time = 0.0;    ///< seconds, within [0, deadline]
  double amount = 0.0;  ///< joules, >= 0
};

/// Battery plus the harvest events that feed it over one problem horizon.
struct HarvestProfile {
  std::vector<HarvestEvent> events;  ///< strictly increasing timestamps
  double battery_capacity = 1.0;     ///< joules; surplus above this is lost
  double initial_charge = 0.0;       ///< joules at time 0, <= capacity
};

void validate_harvest(const HarvestProfile& harvest,
                      const ProblemInstance& instance);

/// Battery level immediately after the state change at `time`. Consecutive
/// points with equal timestamps encode a jump (harvest credit).
struct BatteryPoint {
  double time = 0.0;
  double level = 0.0;
};

/// Per-packet accounting of where transmission energy came from.
struct EnergyLedger {
  std::vector<double> grid_per_packet;
  std::vector<double> harvested_used_per_packet;
  std::vector<double> battery_at_packet_start;
  std::vector<BatteryPoint> battery_trajectory;
  double wasted_overflow = 0.0;  ///< harvest lost to the capacity cap

  double total_grid() const;
  double total_harvested_used() const;
};

struct EhRun {
  Schedule schedule;  ///< identical durations/powers to the online schedule
  EnergyLedger ledger;
};

/// Online schedule powered battery-first: while the battery holds charge the
/// packet drains it at the packet's constant power, and the grid covers the
/// remainder. Harvest landing exactly on a packet boundary is credited
/// before the next packet starts draining. Idle periods only charge the
/// battery. Exact event walk - no time discretization.
EhRun eh_on_schedule(const ArrivalSequence& arrivals,
                     const HarvestProfile& harvest,
                     const ProblemInstance& instance);

/// True when the offline optimum strictly exceeds all energy the battery
/// could ever supply (initial charge plus every harvest amount), i.e. the
/// grid is genuinely needed.
bool eh_nondegeneracy_check(const ArrivalSequence& arrivals,
                            const HarvestProfile& harvest,
                            const ProblemInstance& instance);

/// Thrown when the harvest covers the offline optimum and grid-energy ratios
/// lose meaning.
class DegenerateHarvestError : public std::domain_error {
 public:
  explicit DegenerateHarvestError(const std::string& message)
      : std::domain_error(message) {}
};

/// Thrown when the mean half-window harvest is at least half the offline
/// optimum, so no finite margin factor exists.
class AssumptionUnsatisfiableError : public std::domain_error {
 public:
  explicit AssumptionUnsatisfiableError(const std::string& message)
      : std::domain_error(message) {}
};

/// Margin factor m for the harvested-energy guarantee, plus the resulting
/// competitive-ratio bound m * (1 + ln P).
struct AssumptionMargin {
  double m = 1.0;
  double cr_bound = 1.0;
};

/// Smallest m >= 1 with eta <= (m - 1) * E_opt / (2 m), i.e.
/// m = E_opt / (E_opt - 2 eta). `mean_half_window_energy` (eta) is the
/// expected harvest arriving in either half of the horizon.
AssumptionMargin eh_assumption_margin(const ProblemInstance& instance,
                                      const ArrivalSequence& arrivals,
                                      double mean_half_window_energy);

/// Same computation when the offline optimum energy is already known.
AssumptionMargin margin_from_energy(double opt_energy,
                                    double mean_half_window_energy,
                                    std::size_t packet_count);

/// Upper-bound stand-in for the grid-only competitive ratio:
/// grid energy of the online run divided by
/// max(E_opt - total harvest, 1e-12 * E_opt). Requires nondegeneracy; with
/// no harvest at all it equals competitive_ratio() exactly.
double grid_cr_surrogate(const ArrivalSequence& arrivals,
                         const HarvestProfile& harvest,
                         const ProblemInstance& instance);

}  // namespace cdsched
