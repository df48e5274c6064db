#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cdsched {

/// Physical-layer constants of the transmitter. Every scheduler shares the
/// same convex duration -> energy tradeoff built from these.
struct LinkParams {
  double bits_per_packet = 1.0;  ///< payload per packet, bits
  double noise_density = 1.0;    ///< one-sided noise PSD, W/Hz
  double bandwidth = 1.0;        ///< channel bandwidth, Hz
};

/// A scheduling problem: `packet_count` equal-size packets, the first one
/// arriving at time 0, all due by `deadline`.
struct ProblemInstance {
  std::size_t packet_count = 1;
  double deadline = 1.0;  ///< seconds
  LinkParams link;
};

/// Input/contract violations. `kind()` names the violated invariant so
/// callers can react to specific failures instead of string-matching.
class ValidationError : public std::invalid_argument {
 public:
  enum class Kind {
    negative_gap,
    gap_count_mismatch,
    sum_mismatch,
    late_last_arrival,
    not_decreasing,
    bad_instance,
    bad_harvest,
    bad_config,
  };

  ValidationError(Kind kind, const std::string& message)
      : std::invalid_argument(message), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Thrown when a transmission duration is so short that the rate exponent
/// leaves double range. Callers must treat the duration as infeasibly short;
/// we never let infinities leak into energy sums.
class EnergyOverflowError : public std::domain_error {
 public:
  explicit EnergyOverflowError(const std::string& message)
      : std::domain_error(message) {}
};

/// Relative tolerance when checking that gap sums reproduce the deadline.
inline constexpr double kSumToleranceRel = 1e-9;

void validate_instance(const ProblemInstance& instance);

/// Inter-arrival gaps a_1..a_P. Packet 0 arrives at time 0; gap i (1-based)
/// separates arrivals i-1 and i; the last gap is the auxiliary tail between
/// the final arrival and the deadline, so the gaps always sum to the
/// deadline and the last packet arrives strictly before it.
class ArrivalSequence {
 public:
  const std::vector<double>& gaps() const { return gaps_; }
  std::size_t packet_count() const { return gaps_.size(); }

  /// Arrival instant of 0-based packet `packet`: sum of the first `packet`
  /// gaps. arrival_time(0) == 0.
  double arrival_time(std::size_t packet) const;
  std::vector<double> arrival_times() const;

  /// Whole-vector non-increasing test (membership in the worst-case set of
  /// sequences with non-increasing gaps, auxiliary tail included).
  bool non_increasing(double tolerance = 0.0) const;

 private:
  explicit ArrivalSequence(std::vector<double> gaps) : gaps_(std::move(gaps)) {}

  std::vector<double> gaps_;

  friend ArrivalSequence validate_arrivals(std::vector<double> gaps,
                                           const ProblemInstance& instance);
};

/// The only way to build an ArrivalSequence: checks gap count, gap
/// non-negativity, sum == deadline (1e-9 relative), and that the last packet
/// arrives strictly before the deadline.
ArrivalSequence validate_arrivals(std::vector<double> gaps,
                                  const ProblemInstance& instance);

/// Throws when `arrivals` was built for a different packet count.
void require_compatible(const ArrivalSequence& arrivals,
                        const ProblemInstance& instance);

/// Energy (J) needed to push one packet through the link in `duration`
/// seconds. Strictly decreasing and convex in the duration; throws
/// std::domain_error for non-positive durations and EnergyOverflowError when
/// the rate exponent exceeds double range.
double energy(double duration, const LinkParams& link);

/// Constant transmit power (W) sustained over a packet sent in `duration` s.
double transmit_power(double duration, const LinkParams& link);

/// energy(), except failures map to +infinity instead of throwing. For
/// exhaustive searches that must rank infeasibly short candidates.
double energy_or_infinity(double duration, const LinkParams& link) noexcept;

/// A transmission plan: per-packet durations plus derived start/finish
/// instants and the per-packet energy/power columns.
struct Schedule {
  std::vector<double> durations;
  std::vector<double> starts;
  std::vector<double> finishes;
  std::vector<double> per_packet_energy;
  std::vector<double> per_packet_power;

  std::size_t packet_count() const { return durations.size(); }

  /// Total time spent idle (empty queue) between time 0 and the last finish.
  double idle_time() const;
};

/// Sum of per-packet energies, recomputed from the durations.
double total_energy(const Schedule& schedule, const LinkParams& link);

/// Back-to-back schedule: starts[0] = 0 and every start equals the previous
/// finish. Used by the offline scheduler, which never idles.
Schedule make_contiguous_schedule(const ArrivalSequence& arrivals,
                                  const ProblemInstance& instance,
                                  std::vector<double> durations);

/// Queue-driven schedule: a packet starts at its arrival instant or the
/// previous finish, whichever is later. Used by the online scheduler.
Schedule make_queued_schedule(const ArrivalSequence& arrivals,
                              const ProblemInstance& instance,
                              std::vector<double> durations);

/// Structural checks: positive durations, start ordering, arrival causality,
/// finish-by-deadline (1e-9 relative slack), energy/power column consistency.
void validate_schedule(const Schedule& schedule, const ArrivalSequence& arrivals,
                       const ProblemInstance& instance);

}  // namespace cdsched
