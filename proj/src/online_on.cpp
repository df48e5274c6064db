#include "cdsched/online_on.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cdsched/offline_opt.hpp"

namespace cdsched {

namespace {

// Relative slack (times the deadline) allowed when testing whether gaps are
// non-increasing.
constexpr double kDecreasingTolRel = 1e-12;

// Running state of the online rule. Only the past feeds it: the committed
// arrival prefix, how many packets are still unreleased, and the smallest
// per-packet quota granted so far.
struct OnState {
  double elapsed_cursor = 0.0;
  std::size_t remaining_packets = 0;
  double last_duration = 0.0;
};

std::vector<double> on_durations(const ArrivalSequence& arrivals,
                                 const ProblemInstance& instance) {
  const std::vector<double>& gaps = arrivals.gaps();
  const std::size_t count = gaps.size();
  const double deadline = instance.deadline;
  std::vector<double> durations(count, 0.0);
  OnState state;
  state.remaining_packets = count;
  state.last_duration = deadline / static_cast<double>(count);
  durations[0] = state.last_duration;
  for (std::size_t i = 1; i < count; ++i) {
    state.elapsed_cursor += gaps[i - 1];
    state.remaining_packets = count - i;
    const double quota = (deadline - state.elapsed_cursor) /
                         static_cast<double>(state.remaining_packets);
    state.last_duration = std::min(state.last_duration, quota);
    durations[i] = state.last_duration;
  }
  return durations;
}

}  // namespace

Schedule on_schedule(const ArrivalSequence& arrivals,
                     const ProblemInstance& instance) {
  require_compatible(arrivals, instance);
  return make_queued_schedule(arrivals, instance,
                              on_durations(arrivals, instance));
}

Schedule on_closed_form_decreasing(const ArrivalSequence& arrivals,
                                   const ProblemInstance& instance) {
  require_compatible(arrivals, instance);
  if (!arrivals.non_increasing(kDecreasingTolRel * instance.deadline)) {
    throw ValidationError(
        ValidationError::Kind::not_decreasing,
        "closed form only applies to non-increasing gap sequences");
  }
  const std::size_t count = instance.packet_count;
  const double deadline = instance.deadline;
  std::vector<double> durations(count, 0.0);
  double elapsed = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    durations[i] = (deadline - elapsed) / static_cast<double>(count - i);
    elapsed += arrivals.gaps()[i];
  }
  return make_queued_schedule(arrivals, instance, std::move(durations));
}

double competitive_ratio(const ArrivalSequence& arrivals,
                         const ProblemInstance& instance) {
  const double online = total_energy(on_schedule(arrivals, instance),
                                     instance.link);
  const double offline = total_energy(opt_schedule(arrivals, instance),
                                      instance.link);
  const double ratio = online / offline;
  if (ratio < 1.0 - 1e-9) {
    std::ostringstream msg;
    msg << "online energy " << online << " undercuts the offline optimum "
        << offline << "; the offline scheduler is broken";
    throw std::logic_error(msg.str());
  }
  return ratio;
}

}  // namespace cdsched
