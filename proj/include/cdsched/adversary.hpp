#pragma once

#include <cstdint>
#include <vector>

#include "cdsched/energy_model.hpp"

namespace cdsched {

/// Knobs for the worst-case search. step_size and fd_epsilon are fractions
/// of the deadline; the step halves on every rejected move and the climb
/// stops once it sinks below fd_epsilon.
struct SearchConfig {
  std::size_t restarts = 8;
  double step_size = 0.1;
  double fd_epsilon = 1e-6;
  std::size_t max_iters = 200;
  std::uint64_t seed = 0;
};

void validate_search_config(const SearchConfig& config);

struct SearchResult {
  ArrivalSequence arrivals;  ///< best sequence found
  double cr = 1.0;           ///< its competitive ratio
  double transformed_cr = 1.0;  ///< ratio after the offline-duration rewrite
  bool converged = true;     ///< every restart's step collapsed or plateaued
  std::vector<double> accepted_crs;  ///< ratio after each accepted move of
                                     ///< the best restart (monotone)
};

/// Multi-start projected hill climb maximizing the competitive ratio over
/// gap vectors {a >= 0, sum = deadline}. Gradients come from finite
/// differences along simplex tangents (+eps on one gap, -eps on the
/// auxiliary tail, which itself carries no gradient); iterates are projected
/// back by mean-shift, negative clipping and renormalization. Restarts
/// alternate between raw exponential samples and their offline-duration
/// rewrites. The best sequence is finally rewritten once more and kept if
/// that does not lower the ratio, and a found ratio above 1 + ln P is a
/// logic error.
SearchResult worst_case_search(const ProblemInstance& instance,
                               const SearchConfig& config);

/// Rewrites a sequence into the non-increasing-gap set without lowering the
/// competitive ratio (alias for the offline-duration rewrite).
ArrivalSequence project_to_decreasing(const ArrivalSequence& arrivals,
                                      const ProblemInstance& instance);

/// Lower bound on any online scheduler's competitive ratio when the packet
/// count is hidden: with horizon 1 and one packet landing at 1/2, a second
/// may or may not land right after. Minimizes over the bits committed by
/// time 1/2 (grid of b0_grid+1 points) the worse of the two P=1 / P=2
/// outcome ratios. Grows without bound in `bits`.
double unknown_p_lower_bound(double bits, std::size_t b0_grid);

}  // namespace cdsched
