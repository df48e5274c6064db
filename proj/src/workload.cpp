#include "cdsched/workload.hpp"

#include <cmath>
#include <sstream>

#include "cdsched/rng.hpp"

namespace cdsched {

namespace {

constexpr std::size_t kRedrawBudget = 10000;

// Substream tags so arrivals and harvest never share a generator state even
// when drawn from the same WorkloadSpec.
constexpr std::uint64_t kArrivalStream = 0;
constexpr std::uint64_t kHarvestStream = 1;

}  // namespace

void validate_workload(const WorkloadSpec& spec) {
  const auto bad = [](const std::string& message) {
    return ValidationError(ValidationError::Kind::bad_config, message);
  };
  if (!std::isfinite(spec.arrival_mean)) {
    throw bad("arrival_mean must be finite");
  }
  if (!std::isfinite(spec.harvest_epoch_mean_gap)) {
    throw bad("harvest_epoch_mean_gap must be finite");
  }
  if (!(std::isfinite(spec.harvest_amount_mean) &&
        spec.harvest_amount_mean >= 0.0)) {
    throw bad("harvest_amount_mean must be non-negative and finite");
  }
}

ArrivalSequence gen_arrivals(const ProblemInstance& instance,
                             const WorkloadSpec& spec) {
  validate_instance(instance);
  validate_workload(spec);
  const std::size_t count = instance.packet_count;
  const double deadline = instance.deadline;
  if (count == 1) {
    return validate_arrivals({deadline}, instance);
  }
  const double mean = spec.arrival_mean > 0.0
                          ? spec.arrival_mean
                          : deadline / static_cast<double>(count);
  SplitRng rng = SplitRng::derive(spec.seed, kArrivalStream);
  std::vector<double> gaps(count, 0.0);
  for (std::size_t attempt = 0; attempt < kRedrawBudget; ++attempt) {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < count; ++i) {
      gaps[i] = rng.exponential(mean);
      sum += gaps[i];
    }
    if (sum < deadline) {
      gaps[count - 1] = deadline - sum;
      return validate_arrivals(gaps, instance);
    }
  }
  std::ostringstream msg;
  msg << "arrival sampling rejected " << kRedrawBudget
      << " consecutive draws (mean " << mean << " s vs deadline " << deadline
      << " s)";
  throw GenerationError(msg.str());
}

HarvestProfile gen_harvest(const ProblemInstance& instance,
                           const WorkloadSpec& spec) {
  validate_instance(instance);
  validate_workload(spec);
  const double deadline = instance.deadline;
  const std::size_t epochs = spec.harvest_epoch_count;
  SplitRng rng = SplitRng::derive(spec.seed, kHarvestStream);

  HarvestProfile profile;
  profile.initial_charge = 0.0;
  if (epochs == 0) {
    profile.battery_capacity = 1.0;
    return profile;
  }
  const double gap_mean = spec.harvest_epoch_mean_gap > 0.0
                              ? spec.harvest_epoch_mean_gap
                              : deadline / static_cast<double>(epochs + 1);

  std::vector<double> times(epochs, 0.0);
  bool accepted = false;
  for (std::size_t attempt = 0; attempt < kRedrawBudget && !accepted;
       ++attempt) {
    double t = 0.0;
    accepted = true;
    for (std::size_t i = 0; i < epochs; ++i) {
      const double gap = rng.exponential(gap_mean);
      // A zero gap (probability 2^-53 per draw) would break the strictly
      // increasing timestamp invariant, so the whole profile is redrawn.
      if (gap <= 0.0) {
        accepted = false;
        break;
      }
      t += gap;
      times[i] = t;
    }
    if (accepted && !(times[epochs - 1] < deadline)) accepted = false;
  }
  if (!accepted) {
    std::ostringstream msg;
    msg << "harvest epoch sampling rejected " << kRedrawBudget
        << " consecutive draws (mean gap " << gap_mean << " s vs deadline "
        << deadline << " s)";
    throw GenerationError(msg.str());
  }

  profile.events.resize(epochs);
  double total = 0.0;
  for (std::size_t i = 0; i < epochs; ++i) {
    profile.events[i].time = times[i];
    profile.events[i].amount = rng.exponential(spec.harvest_amount_mean);
    total += profile.events[i].amount;
  }
  // Battery sized to the whole harvest: by construction nothing ever
  // overflows, mirroring the large-battery assumption in the analysis.
  profile.battery_capacity = std::max(total, 1.0);
  validate_harvest(profile, instance);
  return profile;
}

}  // namespace cdsched
