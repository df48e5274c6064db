#include "cdsched/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "cdsched/offline_opt.hpp"
#include "cdsched/online_on.hpp"
#include "cdsched/rng.hpp"

namespace cdsched {

namespace {

constexpr std::size_t kSampleBudget = 10000;

ValidationError bad_config(const std::string& message) {
  return ValidationError(ValidationError::Kind::bad_config, message);
}

// Competitive ratio as a search objective: invalid or infeasibly short
// candidates simply lose (no exceptions escape the climb).
double safe_ratio(const std::vector<double>& gaps,
                  const ProblemInstance& instance) {
  try {
    const ArrivalSequence arrivals = validate_arrivals(gaps, instance);
    return competitive_ratio(arrivals, instance);
  } catch (const ValidationError&) {
    return -std::numeric_limits<double>::infinity();
  } catch (const EnergyOverflowError&) {
    return -std::numeric_limits<double>::infinity();
  } catch (const std::domain_error&) {
    return -std::numeric_limits<double>::infinity();
  }
}

// Mean-shift onto the sum = deadline plane, clip negatives, rescale the
// positive mass back to the deadline.
std::vector<double> project_to_simplex(std::vector<double> gaps,
                                       double deadline) {
  const std::size_t count = gaps.size();
  double sum = 0.0;
  for (double g : gaps) sum += g;
  const double shift = (sum - deadline) / static_cast<double>(count);
  double positive = 0.0;
  for (double& g : gaps) {
    g -= shift;
    if (g < 0.0) g = 0.0;
    positive += g;
  }
  if (positive <= 0.0) {
    // Degenerate step; fall back to the uniform point.
    const double uniform = deadline / static_cast<double>(count);
    std::fill(gaps.begin(), gaps.end(), uniform);
    return gaps;
  }
  const double scale = deadline / positive;
  for (double& g : gaps) g *= scale;
  return gaps;
}

// Exponential gap vector with the tail absorbing the remainder; mirrors the
// workload generator but runs on the search's own substream.
std::vector<double> sample_start(SplitRng& rng, const ProblemInstance& instance) {
  const std::size_t count = instance.packet_count;
  const double deadline = instance.deadline;
  const double mean = deadline / static_cast<double>(count);
  std::vector<double> gaps(count, 0.0);
  for (std::size_t attempt = 0; attempt < kSampleBudget; ++attempt) {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < count; ++i) {
      gaps[i] = rng.exponential(mean);
      sum += gaps[i];
    }
    if (sum < deadline) {
      gaps[count - 1] = deadline - sum;
      return gaps;
    }
  }
  // Practically unreachable at mean = deadline / count; keep a safe fallback.
  const double uniform = deadline / static_cast<double>(count);
  std::fill(gaps.begin(), gaps.end(), uniform);
  return gaps;
}

struct ClimbOutcome {
  std::vector<double> gaps;
  double ratio = -std::numeric_limits<double>::infinity();
  bool converged = false;
  std::vector<double> accepted_ratios;
};

ClimbOutcome hill_climb(std::vector<double> start,
                        const ProblemInstance& instance,
                        const SearchConfig& config) {
  const std::size_t count = instance.packet_count;
  const double deadline = instance.deadline;
  const double fd_eps = config.fd_epsilon * deadline;
  double step = config.step_size * deadline;

  ClimbOutcome out;
  out.gaps = std::move(start);
  out.ratio = safe_ratio(out.gaps, instance);
  out.accepted_ratios.push_back(out.ratio);

  std::vector<double> gradient(count, 0.0);
  for (std::size_t iter = 0; iter < config.max_iters; ++iter) {
    // Finite differences along simplex tangents: +eps to one gap, -eps to
    // the auxiliary tail (flipped when the tail is too small to give). The
    // tail itself carries no gradient; it only absorbs the moves.
    double largest = 0.0;
    for (std::size_t i = 0; i + 1 < count; ++i) {
      std::vector<double> probe = out.gaps;
      double denom = fd_eps;
      if (probe[count - 1] >= fd_eps) {
        probe[i] += fd_eps;
        probe[count - 1] -= fd_eps;
      } else if (probe[i] >= fd_eps) {
        probe[i] -= fd_eps;
        probe[count - 1] += fd_eps;
        denom = -fd_eps;
      } else {
        gradient[i] = 0.0;
        continue;
      }
      const double probed = safe_ratio(probe, instance);
      gradient[i] =
          std::isfinite(probed) ? (probed - out.ratio) / denom : 0.0;
      largest = std::max(largest, std::abs(gradient[i]));
    }
    gradient[count - 1] = 0.0;
    if (largest == 0.0) {
      out.converged = true;  // flat neighborhood; nothing to climb
      break;
    }

    std::vector<double> candidate = out.gaps;
    for (std::size_t i = 0; i < count; ++i) {
      candidate[i] += step * gradient[i] / largest;
    }
    candidate = project_to_simplex(std::move(candidate), deadline);
    const double candidate_ratio = safe_ratio(candidate, instance);
    if (candidate_ratio > out.ratio) {
      out.gaps = std::move(candidate);
      out.ratio = candidate_ratio;
      out.accepted_ratios.push_back(out.ratio);
    } else {
      step *= 0.5;
      if (step < fd_eps) {
        out.converged = true;  // step sank below the gradient resolution
        break;
      }
    }
  }
  return out;
}

}  // namespace

void validate_search_config(const SearchConfig& config) {
  if (config.restarts == 0) throw bad_config("restarts must be at least 1");
  if (config.max_iters == 0) throw bad_config("max_iters must be at least 1");
  if (!(std::isfinite(config.step_size) && config.step_size > 0.0)) {
    throw bad_config("step_size must be positive and finite");
  }
  if (!(std::isfinite(config.fd_epsilon) && config.fd_epsilon > 0.0)) {
    throw bad_config("fd_epsilon must be positive and finite");
  }
  if (config.fd_epsilon >= config.step_size) {
    throw bad_config("fd_epsilon must be smaller than step_size");
  }
}

ArrivalSequence project_to_decreasing(const ArrivalSequence& arrivals,
                                      const ProblemInstance& instance) {
  return opt_transform(arrivals, instance);
}

SearchResult worst_case_search(const ProblemInstance& instance,
                               const SearchConfig& config) {
  validate_instance(instance);
  validate_search_config(config);
  const std::size_t count = instance.packet_count;
  const double deadline = instance.deadline;

  if (count == 1) {
    SearchResult result{validate_arrivals({deadline}, instance), 1.0, 1.0,
                        true, {1.0}};
    return result;
  }

  ClimbOutcome best;
  bool all_converged = true;
  for (std::size_t restart = 0; restart < config.restarts; ++restart) {
    SplitRng rng = SplitRng::derive(config.seed, restart);
    std::vector<double> start = sample_start(rng, instance);
    if (restart % 2 == 1) {
      // Odd restarts climb from inside the non-increasing-gap set, where
      // the worst case is known to live.
      const ArrivalSequence raw = validate_arrivals(start, instance);
      start = opt_transform(raw, instance).gaps();
    }
    ClimbOutcome outcome = hill_climb(std::move(start), instance, config);
    all_converged = all_converged && outcome.converged;
    if (outcome.ratio > best.ratio) best = std::move(outcome);
  }

  if (!std::isfinite(best.ratio)) {
    throw std::logic_error("worst-case search never found a valid sequence");
  }

  // Final polish: the offline-duration rewrite never lowers the ratio, so
  // adopt it when it helps (it usually matches).
  ArrivalSequence best_arrivals = validate_arrivals(best.gaps, instance);
  ArrivalSequence rewritten = opt_transform(best_arrivals, instance);
  const double rewritten_ratio = competitive_ratio(rewritten, instance);
  SearchResult result{best_arrivals, best.ratio, rewritten_ratio,
                      all_converged, std::move(best.accepted_ratios)};
  if (rewritten_ratio >= best.ratio) {
    result.arrivals = rewritten;
    result.cr = rewritten_ratio;
    // Rewriting is idempotent, so the reported pair stays consistent.
    result.transformed_cr = rewritten_ratio;
    result.accepted_crs.push_back(rewritten_ratio);
  }

  const double ceiling =
      1.0 + std::log(static_cast<double>(count)) + 1e-9;
  if (result.cr > ceiling) {
    std::ostringstream msg;
    msg << "found competitive ratio " << result.cr
        << " above the guaranteed ceiling " << ceiling
        << "; the online scheduler is broken";
    throw std::logic_error(msg.str());
  }
  return result;
}

double unknown_p_lower_bound(double bits, std::size_t b0_grid) {
  if (!(std::isfinite(bits) && bits > 0.0)) {
    throw bad_config("bits must be positive and finite");
  }
  if (b0_grid == 0) throw bad_config("b0_grid must be at least 1");

  // Horizon 1, first packet at 1/2. The scheduler commits b0 of the B bits
  // by time 1/2; the adversary then either stops (P=1) or releases a second
  // B-bit packet (P=2). Whichever outcome is worse for the scheduler counts,
  // and the scheduler picks b0 first.
  const auto pow2m1 = [](double x) { return std::exp2(x) - 1.0; };
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j <= b0_grid; ++j) {
    const double b0 = bits * static_cast<double>(j) / static_cast<double>(b0_grid);
    const double first_half = 0.5 * pow2m1(2.0 * b0);
    const double stop_ratio =
        (first_half + 0.5 * pow2m1(2.0 * std::max(bits - b0, 0.0))) /
        pow2m1(bits);
    const double second_ratio =
        (first_half + 0.5 * pow2m1(2.0 * (2.0 * bits - b0))) /
        pow2m1(2.0 * bits);
    best = std::min(best, std::max(stop_ratio, second_ratio));
  }
  return best;
}

}  // namespace cdsched
