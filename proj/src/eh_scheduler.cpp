#include "cdsched/eh_scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cdsched/offline_opt.hpp"
#include "cdsched/online_on.hpp"

namespace cdsched {

namespace {

ValidationError bad_harvest(const std::string& message) {
  return ValidationError(ValidationError::Kind::bad_harvest, message);
}

double total_available(const HarvestProfile& harvest) {
  double total = harvest.initial_charge;
  for (const HarvestEvent& ev : harvest.events) total += ev.amount;
  return total;
}

}  // namespace

void validate_harvest(const HarvestProfile& harvest,
                      const ProblemInstance& instance) {
  validate_instance(instance);
  // Zero capacity is legal and degenerates to an all-grid run (every credit
  // overflows immediately); negative capacity is not.
  if (!(std::isfinite(harvest.battery_capacity) &&
        harvest.battery_capacity >= 0.0)) {
    throw bad_harvest("battery capacity must be non-negative and finite");
  }
  if (!(std::isfinite(harvest.initial_charge) && harvest.initial_charge >= 0.0)) {
    throw bad_harvest("initial charge must be non-negative and finite");
  }
  if (harvest.initial_charge > harvest.battery_capacity) {
    throw bad_harvest("initial charge cannot exceed the battery capacity");
  }
  double prev = -1.0;
  for (std::size_t i = 0; i < harvest.events.size(); ++i) {
    const HarvestEvent& ev = harvest.events[i];
    if (!(std::isfinite(ev.time) && ev.time >= 0.0 &&
          ev.time <= instance.deadline)) {
      std::ostringstream msg;
      msg << "harvest event " << i << " lies outside [0, deadline]";
      throw bad_harvest(msg.str());
    }
    if (ev.time <= prev) {
      throw bad_harvest("harvest timestamps must be strictly increasing");
    }
    if (!(std::isfinite(ev.amount) && ev.amount >= 0.0)) {
      throw bad_harvest("harvest amounts must be non-negative and finite");
    }
    prev = ev.time;
  }
}

double EnergyLedger::total_grid() const {
  double sum = 0.0;
  for (double g : grid_per_packet) sum += g;
  return sum;
}

double EnergyLedger::total_harvested_used() const {
  double sum = 0.0;
  for (double h : harvested_used_per_packet) sum += h;
  return sum;
}

EhRun eh_on_schedule(const ArrivalSequence& arrivals,
                     const HarvestProfile& harvest,
                     const ProblemInstance& instance) {
  require_compatible(arrivals, instance);
  validate_harvest(harvest, instance);

  EhRun run;
  run.schedule = on_schedule(arrivals, instance);
  const Schedule& schedule = run.schedule;
  const std::size_t count = schedule.packet_count();
  const std::vector<HarvestEvent>& events = harvest.events;

  EnergyLedger& ledger = run.ledger;
  ledger.grid_per_packet.assign(count, 0.0);
  ledger.harvested_used_per_packet.assign(count, 0.0);
  ledger.battery_at_packet_start.assign(count, 0.0);

  double battery = harvest.initial_charge;
  std::size_t next_event = 0;

  auto credit_one = [&]() {
    battery += events[next_event].amount;
    if (battery > harvest.battery_capacity) {
      ledger.wasted_overflow += battery - harvest.battery_capacity;
      battery = harvest.battery_capacity;
    }
    ledger.battery_trajectory.push_back({events[next_event].time, battery});
    ++next_event;
  };
  auto credit_up_to = [&](double now) {
    while (next_event < events.size() && events[next_event].time <= now) {
      credit_one();
    }
  };

  ledger.battery_trajectory.push_back({0.0, battery});

  for (std::size_t i = 0; i < count; ++i) {
    // The idle window before packet i only charges the battery. Crediting
    // everything up to the start instant also realizes the boundary rule:
    // harvest landing exactly when a packet begins is in place before the
    // first joule drains.
    credit_up_to(schedule.starts[i]);
    ledger.battery_at_packet_start[i] = battery;
    ledger.battery_trajectory.push_back({schedule.starts[i], battery});

    const double rate = schedule.per_packet_power[i];
    const double finish = schedule.finishes[i];
    double cursor = schedule.starts[i];
    double used = 0.0;
    while (cursor < finish) {
      // Next breakpoint: an in-window harvest event or the packet boundary.
      double horizon = finish;
      if (next_event < events.size() && events[next_event].time < finish) {
        horizon = events[next_event].time;
      }
      if (battery > 0.0) {
        const double empties_at = cursor + battery / rate;
        if (empties_at < horizon) {
          // Battery-empty crossing strictly inside the slice.
          used += battery;
          battery = 0.0;
          cursor = empties_at;
        } else {
          const double drained = std::min(battery, rate * (horizon - cursor));
          used += drained;
          battery = std::max(0.0, battery - drained);
          cursor = horizon;
        }
      } else {
        // Battery flat: the grid carries the slice on its own.
        cursor = horizon;
      }
      ledger.battery_trajectory.push_back({cursor, battery});
      // Credit events that landed exactly at the cursor, but leave events on
      // the finish instant to the next window's entry credit.
      while (next_event < events.size() && events[next_event].time < finish &&
             events[next_event].time <= cursor) {
        credit_one();
      }
    }

    ledger.harvested_used_per_packet[i] = used;
    // Closing the packet against its exact energy keeps the ledger additive
    // and makes the no-harvest case reproduce the grid-only run bit for bit.
    ledger.grid_per_packet[i] =
        std::max(0.0, schedule.per_packet_energy[i] - used);
  }

  // Harvest after the last finish still lands in the battery (it is simply
  // never used).
  credit_up_to(instance.deadline);
  const double horizon_end =
      std::max(instance.deadline, ledger.battery_trajectory.back().time);
  ledger.battery_trajectory.push_back({horizon_end, battery});
  return run;
}

bool eh_nondegeneracy_check(const ArrivalSequence& arrivals,
                            const HarvestProfile& harvest,
                            const ProblemInstance& instance) {
  validate_harvest(harvest, instance);
  const double opt_energy =
      total_energy(opt_schedule(arrivals, instance), instance.link);
  return opt_energy > total_available(harvest);
}

AssumptionMargin margin_from_energy(double opt_energy,
                                    double mean_half_window_energy,
                                    std::size_t packet_count) {
  if (!(std::isfinite(opt_energy) && opt_energy > 0.0)) {
    throw std::domain_error("offline optimum energy must be positive");
  }
  if (!(std::isfinite(mean_half_window_energy) &&
        mean_half_window_energy >= 0.0)) {
    throw std::domain_error("mean half-window energy must be non-negative");
  }
  if (packet_count == 0) {
    throw std::domain_error("packet count must be at least 1");
  }
  if (mean_half_window_energy >= 0.5 * opt_energy) {
    std::ostringstream msg;
    msg << "mean half-window harvest " << mean_half_window_energy
        << " J reaches half the offline optimum " << opt_energy
        << " J; no finite margin factor exists";
    throw AssumptionUnsatisfiableError(msg.str());
  }
  AssumptionMargin margin;
  margin.m = opt_energy / (opt_energy - 2.0 * mean_half_window_energy);
  margin.cr_bound =
      margin.m * (1.0 + std::log(static_cast<double>(packet_count)));
  return margin;
}

AssumptionMargin eh_assumption_margin(const ProblemInstance& instance,
                                      const ArrivalSequence& arrivals,
                                      double mean_half_window_energy) {
  const double opt_energy =
      total_energy(opt_schedule(arrivals, instance), instance.link);
  return margin_from_energy(opt_energy, mean_half_window_energy,
                            instance.packet_count);
}

double grid_cr_surrogate(const ArrivalSequence& arrivals,
                         const HarvestProfile& harvest,
                         const ProblemInstance& instance) {
  const double opt_energy =
      total_energy(opt_schedule(arrivals, instance), instance.link);
  const double available = total_available(harvest);
  if (!(opt_energy > available)) {
    std::ostringstream msg;
    msg << "harvested energy " << available
        << " J covers the offline optimum " << opt_energy
        << " J; the grid-ratio surrogate is undefined";
    throw DegenerateHarvestError(msg.str());
  }
  const EhRun run = eh_on_schedule(arrivals, harvest, instance);
  // The clamp only matters when the denominator was nearly degenerate; the
  // result is an upper bound on the grid-only ratio either way.
  const double denominator =
      std::max(opt_energy - available, 1e-12 * opt_energy);
  return run.ledger.total_grid() / denominator;
}

}  // namespace cdsched
