#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace cdsched {

/// Fuzz-case budgets for the invariant suites. Defaults match the sizes the
/// project is validated at; scaled() shrinks everything for quick runs.
struct SuiteCounts {
  std::size_t energy_shape = 5000;
  std::size_t generator_invariants = 2000;
  std::size_t opt_structure = 10000;
  std::size_t opt_exact_finish = 10000;
  std::size_t on_agreement = 10000;
  std::size_t on_causality = 10000;
  std::size_t transform_directions = 10000;
  std::size_t ratio_bound_per_p = 10000;
  std::size_t ledger_cases = 1000;
  std::size_t monotone_benefit = 1000;
  std::uint64_t seed = 20240817;

  SuiteCounts scaled(double factor) const;
};

struct SuiteResult {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  double worst_margin = 0.0;  ///< most negative slack seen; >= 0 is healthy
  std::string note;

  bool passed() const { return failures == 0; }
};

struct PropertyReport {
  std::vector<SuiteResult> suites;

  bool all_passed() const;
  std::size_t total_failures() const;
};

/// Runs every module's invariant suite on seeded fuzz inputs: energy-curve
/// shape, generator contracts, offline structure (sum/causality/monotone
/// durations and block boundaries), the exact-finish property on
/// non-increasing gaps, online/closed-form agreement, online causality,
/// transform direction/preservation properties, the 1 + ln P ratio ceiling,
/// battery-ledger conservation/greediness, and harvest monotone benefit.
PropertyReport run_property_suite(const SuiteCounts& counts = SuiteCounts{});

void print_report(const PropertyReport& report, std::ostream& out);

}  // namespace cdsched
