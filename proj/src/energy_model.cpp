#include "cdsched/energy_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cdsched {

namespace {

// exp2 arguments beyond this leave double range (DBL_MAX ~ 2^1024).
constexpr double kMaxRateExponent = 1024.0;

ValidationError bad_instance(const std::string& message) {
  return ValidationError(ValidationError::Kind::bad_instance, message);
}

}  // namespace

void validate_instance(const ProblemInstance& instance) {
  if (instance.packet_count == 0) {
    throw bad_instance("packet_count must be at least 1");
  }
  if (!(std::isfinite(instance.deadline) && instance.deadline > 0.0)) {
    throw bad_instance("deadline must be positive and finite");
  }
  const LinkParams& link = instance.link;
  if (!(std::isfinite(link.bits_per_packet) && link.bits_per_packet > 0.0)) {
    throw bad_instance("bits_per_packet must be positive and finite");
  }
  if (!(std::isfinite(link.noise_density) && link.noise_density > 0.0)) {
    throw bad_instance("noise_density must be positive and finite");
  }
  if (!(std::isfinite(link.bandwidth) && link.bandwidth > 0.0)) {
    throw bad_instance("bandwidth must be positive and finite");
  }
}

double ArrivalSequence::arrival_time(std::size_t packet) const {
  double t = 0.0;
  for (std::size_t i = 0; i < packet && i < gaps_.size(); ++i) t += gaps_[i];
  return t;
}

std::vector<double> ArrivalSequence::arrival_times() const {
  std::vector<double> times(gaps_.size(), 0.0);
  double t = 0.0;
  for (std::size_t i = 0; i < gaps_.size(); ++i) {
    times[i] = t;
    t += gaps_[i];
  }
  return times;
}

bool ArrivalSequence::non_increasing(double tolerance) const {
  for (std::size_t i = 0; i + 1 < gaps_.size(); ++i) {
    if (gaps_[i] + tolerance < gaps_[i + 1]) return false;
  }
  return true;
}

ArrivalSequence validate_arrivals(std::vector<double> gaps,
                                  const ProblemInstance& instance) {
  validate_instance(instance);
  if (gaps.size() != instance.packet_count) {
    std::ostringstream msg;
    msg << "expected " << instance.packet_count << " gaps, got " << gaps.size();
    throw ValidationError(ValidationError::Kind::gap_count_mismatch, msg.str());
  }
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    if (!(std::isfinite(gaps[i]) && gaps[i] >= 0.0)) {
      std::ostringstream msg;
      msg << "gap " << i + 1 << " must be finite and non-negative, got "
          << gaps[i];
      throw ValidationError(ValidationError::Kind::negative_gap, msg.str());
    }
  }
  double before_last = 0.0;
  for (std::size_t i = 0; i + 1 < gaps.size(); ++i) before_last += gaps[i];
  const double sum = before_last + gaps.back();
  const double deadline = instance.deadline;
  if (std::abs(sum - deadline) > kSumToleranceRel * deadline) {
    std::ostringstream msg;
    msg << "gaps sum to " << sum << " but the deadline is " << deadline;
    throw ValidationError(ValidationError::Kind::sum_mismatch, msg.str());
  }
  if (!(before_last < deadline)) {
    throw ValidationError(ValidationError::Kind::late_last_arrival,
                          "last packet must arrive strictly before the deadline");
  }
  return ArrivalSequence(std::move(gaps));
}

void require_compatible(const ArrivalSequence& arrivals,
                        const ProblemInstance& instance) {
  if (arrivals.packet_count() != instance.packet_count) {
    std::ostringstream msg;
    msg << "arrival sequence has " << arrivals.packet_count()
        << " packets but the instance expects " << instance.packet_count;
    throw ValidationError(ValidationError::Kind::gap_count_mismatch, msg.str());
  }
}

double energy(double duration, const LinkParams& link) {
  if (!(duration > 0.0)) {
    throw std::domain_error("transmission duration must be positive");
  }
  const double exponent = link.bits_per_packet / (duration * link.bandwidth);
  if (exponent > kMaxRateExponent) {
    std::ostringstream msg;
    msg << "rate exponent " << exponent
        << " exceeds double range; duration " << duration
        << " s is infeasibly short for " << link.bits_per_packet << " bits";
    throw EnergyOverflowError(msg.str());
  }
  const double value =
      link.noise_density * link.bandwidth * duration * (std::exp2(exponent) - 1.0);
  if (!std::isfinite(value)) {
    throw EnergyOverflowError("energy overflowed double range");
  }
  return value;
}

double transmit_power(double duration, const LinkParams& link) {
  return energy(duration, link) / duration;
}

double energy_or_infinity(double duration, const LinkParams& link) noexcept {
  if (!(duration > 0.0)) return std::numeric_limits<double>::infinity();
  const double exponent = link.bits_per_packet / (duration * link.bandwidth);
  if (exponent > kMaxRateExponent) {
    return std::numeric_limits<double>::infinity();
  }
  const double value =
      link.noise_density * link.bandwidth * duration * (std::exp2(exponent) - 1.0);
  if (!std::isfinite(value)) return std::numeric_limits<double>::infinity();
  return value;
}

double Schedule::idle_time() const {
  double idle = 0.0;
  double prev_finish = 0.0;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    idle += std::max(0.0, starts[i] - prev_finish);
    prev_finish = finishes[i];
  }
  return idle;
}

double total_energy(const Schedule& schedule, const LinkParams& link) {
  double sum = 0.0;
  for (double d : schedule.durations) sum += energy(d, link);
  return sum;
}

namespace {

Schedule build_schedule(const ArrivalSequence& arrivals,
                        const ProblemInstance& instance,
                        std::vector<double> durations, bool queued) {
  require_compatible(arrivals, instance);
  if (durations.size() != instance.packet_count) {
    throw ValidationError(ValidationError::Kind::bad_config,
                          "duration count does not match the packet count");
  }
  Schedule s;
  s.durations = std::move(durations);
  const std::size_t count = s.durations.size();
  s.starts.resize(count);
  s.finishes.resize(count);
  s.per_packet_energy.resize(count);
  s.per_packet_power.resize(count);
  const std::vector<double> arrival_times = arrivals.arrival_times();
  double prev_finish = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    s.starts[i] = queued ? std::max(prev_finish, arrival_times[i]) : prev_finish;
    s.finishes[i] = s.starts[i] + s.durations[i];
    s.per_packet_energy[i] = energy(s.durations[i], instance.link);
    s.per_packet_power[i] = s.per_packet_energy[i] / s.durations[i];
    prev_finish = s.finishes[i];
  }
  return s;
}

}  // namespace

Schedule make_contiguous_schedule(const ArrivalSequence& arrivals,
                                  const ProblemInstance& instance,
                                  std::vector<double> durations) {
  return build_schedule(arrivals, instance, std::move(durations), false);
}

Schedule make_queued_schedule(const ArrivalSequence& arrivals,
                              const ProblemInstance& instance,
                              std::vector<double> durations) {
  return build_schedule(arrivals, instance, std::move(durations), true);
}

void validate_schedule(const Schedule& schedule, const ArrivalSequence& arrivals,
                       const ProblemInstance& instance) {
  require_compatible(arrivals, instance);
  const std::size_t count = instance.packet_count;
  const double deadline = instance.deadline;
  const double tol = kSumToleranceRel * deadline;
  const auto fail = [](const std::string& message) {
    throw ValidationError(ValidationError::Kind::bad_config, message);
  };
  if (schedule.durations.size() != count || schedule.starts.size() != count ||
      schedule.finishes.size() != count ||
      schedule.per_packet_energy.size() != count ||
      schedule.per_packet_power.size() != count) {
    fail("schedule columns must all have one row per packet");
  }
  const std::vector<double> arrival_times = arrivals.arrival_times();
  double prev_finish = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    if (!(schedule.durations[i] > 0.0)) fail("durations must be positive");
    if (schedule.starts[i] < prev_finish - tol) {
      fail("a packet starts before the previous one finishes");
    }
    if (schedule.starts[i] < arrival_times[i] - tol) {
      fail("a packet starts before it arrives");
    }
    const double finish = schedule.starts[i] + schedule.durations[i];
    if (std::abs(finish - schedule.finishes[i]) > tol) {
      fail("finish column disagrees with start + duration");
    }
    const double e = energy(schedule.durations[i], instance.link);
    if (std::abs(e - schedule.per_packet_energy[i]) >
        1e-12 * std::max(1.0, e)) {
      fail("energy column disagrees with the duration");
    }
    if (std::abs(schedule.per_packet_power[i] * schedule.durations[i] - e) >
        1e-9 * std::max(1.0, e)) {
      fail("power column disagrees with the energy");
    }
    prev_finish = schedule.finishes[i];
  }
  if (prev_finish > deadline * (1.0 + kSumToleranceRel)) {
    fail("the last packet finishes after the deadline");
  }
}

}  // namespace cdsched
