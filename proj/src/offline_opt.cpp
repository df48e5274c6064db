#include "cdsched/offline_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cdsched {

namespace {

// Relative tolerance for the largest-average tie-break. Prefixes whose
// running average sits within this of the maximum count as achieving it, and
// the longest one wins; merging such near-ties is what keeps consecutive
// block durations strictly decreasing.
constexpr double kTieToleranceRel = 1e-12;

}  // namespace

std::vector<GroupBoundary> opt_group_boundaries(const ArrivalSequence& arrivals,
                                                const ProblemInstance& instance) {
  require_compatible(arrivals, instance);
  const std::vector<double>& gaps = arrivals.gaps();
  const std::size_t count = gaps.size();
  std::vector<GroupBoundary> groups;
  std::size_t start = 0;
  while (start < count) {
    // Largest running average over prefixes of the remaining gaps.
    double best_avg = -1.0;
    double sum = 0.0;
    for (std::size_t len = 1; len <= count - start; ++len) {
      sum += gaps[start + len - 1];
      best_avg = std::max(best_avg, sum / static_cast<double>(len));
    }
    // Longest prefix achieving the maximum (ties at 1e-12 relative).
    const double threshold = best_avg * (1.0 - kTieToleranceRel);
    std::size_t best_len = 1;
    double best_sum = gaps[start];
    sum = 0.0;
    for (std::size_t len = 1; len <= count - start; ++len) {
      sum += gaps[start + len - 1];
      if (sum / static_cast<double>(len) >= threshold) {
        best_len = len;
        best_sum = sum;
      }
    }
    // The realized block average (not best_avg) keeps durations summing to
    // the deadline exactly even when a near-tie was merged.
    groups.push_back(
        {start + best_len, best_sum / static_cast<double>(best_len)});
    start += best_len;
  }
  return groups;
}

Schedule opt_schedule(const ArrivalSequence& arrivals,
                      const ProblemInstance& instance) {
  const std::vector<GroupBoundary> groups =
      opt_group_boundaries(arrivals, instance);
  std::vector<double> durations(instance.packet_count, 0.0);
  std::size_t begin = 0;
  for (const GroupBoundary& g : groups) {
    for (std::size_t i = begin; i < g.end_index; ++i) {
      durations[i] = g.group_duration;
    }
    begin = g.end_index;
  }
  return make_contiguous_schedule(arrivals, instance, std::move(durations));
}

ArrivalSequence opt_transform(const ArrivalSequence& arrivals,
                              const ProblemInstance& instance) {
  Schedule schedule = opt_schedule(arrivals, instance);
  // The offline durations become the new gaps: they sum to the deadline and
  // are non-increasing, so the rewritten sequence is always valid.
  return validate_arrivals(std::move(schedule.durations), instance);
}

Schedule opt_oracle(const ArrivalSequence& arrivals,
                    const ProblemInstance& instance, double grid_step) {
  require_compatible(arrivals, instance);
  const std::size_t count = instance.packet_count;
  const double deadline = instance.deadline;
  const auto bad = [](const std::string& message) {
    return ValidationError(ValidationError::Kind::bad_config, message);
  };
  if (count > 4) {
    throw bad("the brute-force check refuses more than 4 packets");
  }
  if (!(std::isfinite(grid_step) && grid_step > 0.0)) {
    throw bad("grid_step must be positive and finite");
  }
  const long long cells = std::llround(deadline / grid_step);
  if (cells < static_cast<long long>(count)) {
    throw bad("grid too coarse: fewer cells than packets");
  }
  if (std::abs(static_cast<double>(cells) * grid_step - deadline) >
      1e-6 * deadline) {
    throw bad("grid_step must divide the deadline evenly");
  }
  if (cells > 10000) {
    throw bad("grid_step divides the deadline into more than 10^4 cells");
  }
  double combos = 1.0;
  for (std::size_t i = 0; i + 1 < count; ++i) combos *= static_cast<double>(cells);
  if (combos > 2e7) {
    throw bad("grid too fine for this packet count; the scan would not finish");
  }

  if (count == 1) {
    return make_contiguous_schedule(arrivals, instance, {deadline});
  }

  // Pre-tabulate the energy of every possible grid duration; infeasibly
  // short cells rank as +infinity and simply lose the comparison.
  std::vector<double> cell_energy(static_cast<std::size_t>(cells) + 1,
                                  std::numeric_limits<double>::infinity());
  for (long long k = 1; k <= cells; ++k) {
    cell_energy[static_cast<std::size_t>(k)] =
        energy_or_infinity(static_cast<double>(k) * grid_step, instance.link);
  }

  // Earliest admissible finish cell per packet: the cumulative transmission
  // time may never undercut the cumulative arrivals.
  const std::vector<double> arrival_times = arrivals.arrival_times();
  std::vector<long long> min_finish_cell(count, 0);
  for (std::size_t i = 0; i < count; ++i) {
    const double needed = i + 1 < count ? arrival_times[i + 1] : deadline;
    min_finish_cell[i] = static_cast<long long>(
        std::ceil(needed / grid_step - 1e-9));
  }

  double best = std::numeric_limits<double>::infinity();
  std::vector<long long> finish(count, 0);
  std::vector<long long> best_finish;
  finish[count - 1] = cells;

  // Depth-first scan over strictly increasing, causality-respecting finish
  // cells. The last finish is pinned to the deadline (non-idling).
  auto scan = [&](auto&& self, std::size_t i, long long prev,
                  double partial) -> void {
    if (i + 1 == count) {
      const long long span = cells - prev;
      if (span <= 0) return;
      const double total = partial + cell_energy[static_cast<std::size_t>(span)];
      if (total < best) {
        best = total;
        best_finish = finish;
      }
      return;
    }
    for (long long c = std::max(prev + 1, min_finish_cell[i]); c < cells; ++c) {
      const double e = cell_energy[static_cast<std::size_t>(c - prev)];
      if (std::isinf(e)) continue;
      finish[i] = c;
      self(self, i + 1, c, partial + e);
    }
  };
  scan(scan, 0, 0, 0.0);

  if (best_finish.empty() || !std::isfinite(best)) {
    throw EnergyOverflowError(
        "no grid plan has finite energy; refine the grid or shrink the load");
  }
  best_finish[count - 1] = cells;
  std::vector<double> durations(count, 0.0);
  long long prev = 0;
  for (std::size_t i = 0; i < count; ++i) {
    durations[i] = static_cast<double>(best_finish[i] - prev) * grid_step;
    prev = best_finish[i];
  }
  // Make the durations close the horizon exactly despite grid rounding.
  double sum = 0.0;
  for (double d : durations) sum += d;
  durations[count - 1] += deadline - sum;
  return make_contiguous_schedule(arrivals, instance, std::move(durations));
}

}  // namespace cdsched
