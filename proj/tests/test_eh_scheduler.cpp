#include <doctest.h>

#include <cmath>
#include <vector>

#include "cdsched/eh_scheduler.hpp"
#include "cdsched/energy_model.hpp"
#include "cdsched/offline_opt.hpp"
#include "cdsched/online_on.hpp"

using namespace cdsched;

namespace {

ProblemInstance unit_instance(std::size_t packets, double deadline = 1.0) {
  ProblemInstance instance;
  instance.packet_count = packets;
  instance.deadline = deadline;
  return instance;
}

HarvestProfile profile(std::vector<HarvestEvent> events, double capacity,
                       double initial = 0.0) {
  HarvestProfile p;
  p.events = std::move(events);
  p.battery_capacity = capacity;
  p.initial_charge = initial;
  return p;
}

}  // namespace

TEST_SUITE("eh_scheduler") {

TEST_CASE("single-packet worked example: battery covers 0.2 J in the middle") {
  // One packet over one second at 1 W; 0.2 J lands at t=0.5. Grid powers
  // [0, 0.5), battery powers [0.5, 0.7), grid again on [0.7, 1].
  const ProblemInstance instance = unit_instance(1);
  const ArrivalSequence arrivals = validate_arrivals({1.0}, instance);
  const HarvestProfile harvest = profile({{0.5, 0.2}}, 1.0);

  const EhRun run = eh_on_schedule(arrivals, harvest, instance);
  CHECK(run.schedule.durations[0] == 1.0);
  CHECK(run.schedule.per_packet_power[0] == doctest::Approx(1.0));
  CHECK(run.ledger.grid_per_packet[0] == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(run.ledger.harvested_used_per_packet[0] ==
        doctest::Approx(0.2).epsilon(1e-12));
  CHECK(run.ledger.wasted_overflow == 0.0);

  // The trajectory must contain the jump at 0.5 and the empty point at 0.7.
  bool saw_credit = false;
  bool saw_empty_at_07 = false;
  for (const BatteryPoint& p : run.ledger.battery_trajectory) {
    if (p.time == 0.5 && p.level == doctest::Approx(0.2)) saw_credit = true;
    if (p.time == doctest::Approx(0.7) && p.level == doctest::Approx(0.0)) {
      saw_empty_at_07 = true;
    }
  }
  CHECK(saw_credit);
  CHECK(saw_empty_at_07);
}

TEST_CASE("no harvest events: the ledger is all-grid, exactly") {
  const ProblemInstance instance = unit_instance(3);
  const ArrivalSequence arrivals =
      validate_arrivals({0.5, 0.3, 0.2}, instance);
  const HarvestProfile harvest = profile({}, 1.0);
  const EhRun run = eh_on_schedule(arrivals, harvest, instance);
  const Schedule plain = on_schedule(arrivals, instance);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(run.ledger.grid_per_packet[i] == plain.per_packet_energy[i]);
    CHECK(run.ledger.harvested_used_per_packet[i] == 0.0);
  }
  CHECK(run.ledger.wasted_overflow == 0.0);
}

TEST_CASE("an event at time zero covering everything zeroes the grid") {
  const ProblemInstance instance = unit_instance(2);
  const ArrivalSequence arrivals = validate_arrivals({0.2, 0.8}, instance);
  const double on_energy =
      total_energy(on_schedule(arrivals, instance), instance.link);
  const HarvestProfile harvest =
      profile({{0.0, on_energy + 1.0}}, on_energy + 1.0);
  const EhRun run = eh_on_schedule(arrivals, harvest, instance);
  CHECK(run.ledger.total_grid() == 0.0);
  CHECK(run.ledger.total_harvested_used() ==
        doctest::Approx(on_energy).epsilon(1e-12));
}

TEST_CASE("durations and powers always equal the plain online schedule") {
  const ProblemInstance instance = unit_instance(4);
  const ArrivalSequence arrivals =
      validate_arrivals({0.4, 0.1, 0.3, 0.2}, instance);
  const HarvestProfile harvest =
      profile({{0.1, 0.3}, {0.45, 0.2}, {0.9, 1.0}}, 0.6, 0.25);
  const EhRun run = eh_on_schedule(arrivals, harvest, instance);
  const Schedule plain = on_schedule(arrivals, instance);
  CHECK(run.schedule.durations == plain.durations);
  CHECK(run.schedule.starts == plain.starts);
  CHECK(run.schedule.per_packet_power == plain.per_packet_power);
}

TEST_CASE("energy is conserved and overflow is recorded") {
  const ProblemInstance instance = unit_instance(2);
  const ArrivalSequence arrivals = validate_arrivals({0.8, 0.2}, instance);
  // Capacity 0.1 J, two 0.3 J lumps during the idle window: most overflows.
  const HarvestProfile harvest =
      profile({{0.55, 0.3}, {0.6, 0.3}}, 0.1);
  const EhRun run = eh_on_schedule(arrivals, harvest, instance);
  CHECK(run.ledger.wasted_overflow > 0.0);
  const double supply = 0.6;
  const double final_level = run.ledger.battery_trajectory.back().level;
  CHECK(run.ledger.total_harvested_used() + final_level +
            run.ledger.wasted_overflow ==
        doctest::Approx(supply).epsilon(1e-9));
  // The 0.1 J surviving lump powers the start of packet 1.
  CHECK(run.ledger.battery_at_packet_start[1] == doctest::Approx(0.1));
}

TEST_CASE("harvest landing exactly on a packet boundary feeds the next packet") {
  const ProblemInstance instance = unit_instance(2);
  const ArrivalSequence arrivals = validate_arrivals({0.5, 0.5}, instance);
  // ON runs back-to-back: packet 1 starts exactly at 0.5, where 0.2 J lands.
  const HarvestProfile harvest = profile({{0.5, 0.2}}, 1.0);
  const EhRun run = eh_on_schedule(arrivals, harvest, instance);
  CHECK(run.ledger.harvested_used_per_packet[0] == 0.0);
  CHECK(run.ledger.battery_at_packet_start[1] == doctest::Approx(0.2));
  CHECK(run.ledger.harvested_used_per_packet[1] ==
        doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("zero-capacity battery degenerates to the all-grid ledger") {
  const ProblemInstance instance = unit_instance(2);
  const ArrivalSequence arrivals = validate_arrivals({0.5, 0.5}, instance);
  const HarvestProfile harvest = profile({{0.2, 0.4}, {0.6, 0.1}}, 0.0);
  const EhRun run = eh_on_schedule(arrivals, harvest, instance);
  const Schedule plain = on_schedule(arrivals, instance);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(run.ledger.grid_per_packet[i] == plain.per_packet_energy[i]);
    CHECK(run.ledger.harvested_used_per_packet[i] == 0.0);
  }
  CHECK(run.ledger.wasted_overflow == doctest::Approx(0.5));
}

TEST_CASE("validate_harvest rejects malformed profiles") {
  const ProblemInstance instance = unit_instance(1);
  CHECK_THROWS_AS(
      validate_harvest(profile({}, -1.0), instance), ValidationError);
  CHECK_THROWS_AS(
      validate_harvest(profile({}, 1.0, 2.0), instance), ValidationError);
  CHECK_THROWS_AS(
      validate_harvest(profile({}, 1.0, -0.1), instance), ValidationError);
  CHECK_THROWS_AS(
      validate_harvest(profile({{0.5, 0.1}, {0.5, 0.1}}, 1.0), instance),
      ValidationError);  // duplicate timestamp
  CHECK_THROWS_AS(
      validate_harvest(profile({{0.8, 0.1}, {0.2, 0.1}}, 1.0), instance),
      ValidationError);  // out of order
  CHECK_THROWS_AS(
      validate_harvest(profile({{1.5, 0.1}}, 1.0), instance),
      ValidationError);  // beyond the deadline
  CHECK_THROWS_AS(
      validate_harvest(profile({{0.5, -0.1}}, 1.0), instance),
      ValidationError);  // negative amount
  CHECK_NOTHROW(validate_harvest(profile({{0.5, 0.0}}, 1.0), instance));
}

TEST_CASE("nondegeneracy: grid must be genuinely needed") {
  const ProblemInstance instance = unit_instance(2);
  const ArrivalSequence arrivals = validate_arrivals({0.8, 0.2}, instance);
  // Offline optimum is 7.302731 J here.
  CHECK(eh_nondegeneracy_check(arrivals, profile({}, 1.0), instance));
  CHECK(eh_nondegeneracy_check(arrivals, profile({{0.5, 5.0}}, 6.0), instance));
  CHECK_FALSE(eh_nondegeneracy_check(
      arrivals, profile({{0.5, 15.0}}, 20.0), instance));
  // Initial charge counts as available energy.
  CHECK_FALSE(eh_nondegeneracy_check(
      arrivals, profile({{0.5, 4.0}}, 8.0, 4.0), instance));
}

TEST_CASE("assumption margin solves for m") {
  const ProblemInstance instance = unit_instance(2);
  const ArrivalSequence arrivals = validate_arrivals({0.8, 0.2}, instance);
  const double opt = 7.302731384004354;

  const AssumptionMargin none = eh_assumption_margin(instance, arrivals, 0.0);
  CHECK(none.m == doctest::Approx(1.0));
  CHECK(none.cr_bound == doctest::Approx(1.0 + std::log(2.0)));

  const AssumptionMargin quarter =
      eh_assumption_margin(instance, arrivals, opt / 4.0);
  CHECK(quarter.m == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(quarter.cr_bound ==
        doctest::Approx(2.0 * (1.0 + std::log(2.0))).epsilon(1e-9));

  CHECK_THROWS_AS(eh_assumption_margin(instance, arrivals, opt / 2.0),
                  AssumptionUnsatisfiableError);
  CHECK_THROWS_AS(eh_assumption_margin(instance, arrivals, opt),
                  AssumptionUnsatisfiableError);

  const AssumptionMargin direct = margin_from_energy(10.0, 2.5, 2);
  CHECK(direct.m == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("surrogate ratio: worked example and degeneracy guard") {
  const ProblemInstance instance = unit_instance(2);
  const ArrivalSequence arrivals = validate_arrivals({0.8, 0.2}, instance);

  // 1 J at t=0: greedy spends all of it (ON uses 1.5 J before idling), so
  // grid = 7.7 - 1 and the denominator is E_opt - 1.
  const HarvestProfile one_joule = profile({{0.0, 1.0}}, 1.0);
  CHECK(grid_cr_surrogate(arrivals, one_joule, instance) ==
        doctest::Approx(6.7 / 6.302731384004354).epsilon(1e-9));

  // No harvest: the surrogate IS the competitive ratio, bit for bit.
  const HarvestProfile dry = profile({}, 1.0);
  CHECK(grid_cr_surrogate(arrivals, dry, instance) ==
        competitive_ratio(arrivals, instance));

  // A battery absorbing the whole online energy drives the surrogate to 0.
  const HarvestProfile full = profile({{0.0, 7.0}}, 7.0);
  CHECK(grid_cr_surrogate(arrivals, full, instance) ==
        doctest::Approx(0.7 / 0.302731384004354).epsilon(1e-6));

  CHECK_THROWS_AS(
      grid_cr_surrogate(arrivals, profile({{0.1, 20.0}}, 30.0), instance),
      DegenerateHarvestError);
}

TEST_CASE("battery trajectory stays within bounds and ends at the deadline") {
  const ProblemInstance instance = unit_instance(3);
  const ArrivalSequence arrivals =
      validate_arrivals({0.5, 0.3, 0.2}, instance);
  const HarvestProfile harvest =
      profile({{0.1, 0.2}, {0.7, 0.4}, {0.95, 0.3}}, 0.5, 0.1);
  const EhRun run = eh_on_schedule(arrivals, harvest, instance);
  REQUIRE_FALSE(run.ledger.battery_trajectory.empty());
  double prev_time = 0.0;
  for (const BatteryPoint& p : run.ledger.battery_trajectory) {
    CHECK(p.time >= prev_time);
    CHECK(p.level >= 0.0);
    CHECK(p.level <= 0.5 + 1e-12);
    prev_time = p.time;
  }
  CHECK(run.ledger.battery_trajectory.back().time ==
        doctest::Approx(instance.deadline));
}

}  // TEST_SUITE
