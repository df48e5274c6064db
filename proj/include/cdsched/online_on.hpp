#pragma once

#include "cdsched/energy_model.hpp"

namespace cdsched {

/// Online schedule: packet i transmits for the smallest remaining-time quota
/// seen so far, where the quota at arrival i is
/// (deadline - arrival_i) / (packets not yet released). Durations therefore
/// never increase. The transmitter idles whenever the queue empties and a
/// packet starts at max(previous finish, its arrival).
Schedule on_schedule(const ArrivalSequence& arrivals,
                     const ProblemInstance& instance);

/// Closed form for sequences with non-increasing gaps: the running minimum
/// collapses and packet i simply gets (deadline - arrival_i) / (P - i).
/// Throws ValidationError(not_decreasing) off that set.
Schedule on_closed_form_decreasing(const ArrivalSequence& arrivals,
                                   const ProblemInstance& instance);

/// Online-to-offline energy ratio for one sequence. Always >= 1 up to float
/// noise; a ratio below 1 - 1e-9 means the offline optimum was beaten and is
/// reported as a logic error.
double competitive_ratio(const ArrivalSequence& arrivals,
                         const ProblemInstance& instance);

}  // namespace cdsched
