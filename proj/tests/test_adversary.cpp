#include <doctest.h>

#include <cmath>
#include <vector>

#include "cdsched/adversary.hpp"
#include "cdsched/energy_model.hpp"
#include "cdsched/online_on.hpp"

using namespace cdsched;

namespace {

ProblemInstance unit_instance(std::size_t packets, double deadline = 1.0) {
  ProblemInstance instance;
  instance.packet_count = packets;
  instance.deadline = deadline;
  return instance;
}

}  // namespace

TEST_SUITE("adversary") {

TEST_CASE("single packet is trivially optimal: ratio exactly one") {
  const ProblemInstance instance = unit_instance(1, 3.0);
  SearchConfig config;
  config.restarts = 2;
  const SearchResult result = worst_case_search(instance, config);
  CHECK(result.cr == 1.0);
  CHECK(result.transformed_cr == 1.0);
  CHECK(result.converged);
  CHECK(result.arrivals.gaps() == std::vector<double>{3.0});
}

TEST_CASE("two-packet search beats the known hand-built sequence") {
  // The gap vector (0.8, 0.2) already forces a ratio of 1.05440..., so any
  // sound maximizer must return at least that much.
  const ProblemInstance instance = unit_instance(2, 1.0);
  SearchConfig config;
  config.restarts = 6;
  config.seed = 7;
  const SearchResult result = worst_case_search(instance, config);
  CHECK(result.cr >= 1.0544);
  CHECK(result.cr <= 1.0 + std::log(2.0));
}

TEST_CASE("reported ratio matches a recomputation on the found sequence") {
  for (std::size_t packets : {2u, 3u, 5u}) {
    CAPTURE(packets);
    const ProblemInstance instance = unit_instance(packets, 1.0);
    SearchConfig config;
    config.restarts = 3;
    config.seed = 11;
    const SearchResult result = worst_case_search(instance, config);

    const double recomputed = competitive_ratio(result.arrivals, instance);
    CHECK(result.cr == doctest::Approx(recomputed).epsilon(1e-12));
    CHECK(result.cr >= 1.0 - 1e-9);
    CHECK(result.cr <= 1.0 + std::log(static_cast<double>(packets)) + 1e-9);
  }
}

TEST_CASE("the rewrite of the winner never lowers the ratio") {
  const ProblemInstance instance = unit_instance(4, 1.0);
  SearchConfig config;
  config.restarts = 4;
  config.seed = 5;
  const SearchResult result = worst_case_search(instance, config);
  CHECK(result.transformed_cr >= result.cr - 1e-9);

  const ArrivalSequence rewritten =
      project_to_decreasing(result.arrivals, instance);
  CHECK(competitive_ratio(rewritten, instance) >= result.cr - 1e-9);
}

TEST_CASE("accepted ratios climb monotonically") {
  const ProblemInstance instance = unit_instance(3, 1.0);
  SearchConfig config;
  config.restarts = 4;
  config.seed = 2;
  const SearchResult result = worst_case_search(instance, config);
  REQUIRE(!result.accepted_crs.empty());
  for (std::size_t i = 1; i < result.accepted_crs.size(); ++i) {
    CHECK(result.accepted_crs[i] >= result.accepted_crs[i - 1]);
  }
  CHECK(result.accepted_crs.back() == doctest::Approx(result.cr));
}

TEST_CASE("search is deterministic for a fixed seed") {
  const ProblemInstance instance = unit_instance(3, 1.0);
  SearchConfig config;
  config.restarts = 3;
  config.seed = 31;
  const SearchResult a = worst_case_search(instance, config);
  const SearchResult b = worst_case_search(instance, config);
  CHECK(a.cr == b.cr);
  CHECK(a.arrivals.gaps() == b.arrivals.gaps());
}

TEST_CASE("config validation rejects broken knobs") {
  const auto expect_bad = [](SearchConfig config) {
    try {
      validate_search_config(config);
      FAIL("expected a config rejection");
    } catch (const ValidationError& e) {
      CHECK(e.kind() == ValidationError::Kind::bad_config);
    }
  };

  SearchConfig config;
  config.restarts = 0;
  expect_bad(config);

  config = SearchConfig{};
  config.max_iters = 0;
  expect_bad(config);

  config = SearchConfig{};
  config.step_size = 0.0;
  expect_bad(config);

  config = SearchConfig{};
  config.fd_epsilon = -1.0;
  expect_bad(config);

  config = SearchConfig{};
  config.fd_epsilon = config.step_size;  // must be strictly smaller
  expect_bad(config);

  CHECK_NOTHROW(validate_search_config(SearchConfig{}));
}

TEST_CASE("rewrite worked examples") {
  const ProblemInstance instance = unit_instance(2, 1.0);
  // Increasing gaps merge into one equal-duration group.
  const ArrivalSequence increasing = validate_arrivals({0.2, 0.8}, instance);
  const ArrivalSequence merged = project_to_decreasing(increasing, instance);
  CHECK(merged.gaps()[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(merged.gaps()[1] == doctest::Approx(0.5).epsilon(1e-12));

  // Already-decreasing input is a fixed point.
  const ArrivalSequence decreasing = validate_arrivals({0.8, 0.2}, instance);
  const ArrivalSequence same = project_to_decreasing(decreasing, instance);
  CHECK(same.gaps()[0] == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(same.gaps()[1] == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("hidden-count bound: frozen grid values") {
  // Frozen against the 4096-point commitment grid; these digits pin the
  // two-branch ratio algebra and the grid-minimization order.
  CHECK(unknown_p_lower_bound(1.0, 4096) ==
        doctest::Approx(1.0981689547190414).epsilon(1e-12));
  CHECK(unknown_p_lower_bound(2.0, 4096) ==
        doctest::Approx(1.2973813500215323).epsilon(1e-12));
  CHECK(unknown_p_lower_bound(4.0, 4096) ==
        doctest::Approx(2.1651503506834691).epsilon(1e-12));
}

TEST_CASE("hidden-count bound grows without limit in the payload") {
  double prev = 0.0;
  for (double bits : {1.0, 2.0, 4.0, 8.0, 16.0}) {
    const double value = unknown_p_lower_bound(bits, 2048);
    CAPTURE(bits);
    CHECK(value > prev);
    CHECK(value >= 1.0);
    prev = value;
  }
  // By eight bits the bound already exceeds the known-count ceiling for two
  // packets, so no single scheduler can stay competitive without the count.
  CHECK(unknown_p_lower_bound(8.0, 4096) > 1.0 + std::log(2.0));
}

TEST_CASE("hidden-count bound stays near one for vanishing payloads") {
  const double value = unknown_p_lower_bound(1e-3, 2048);
  CHECK(value >= 1.0);
  CHECK(value < 1.01);
}

TEST_CASE("hidden-count bound rejects bad arguments") {
  CHECK_THROWS_AS(unknown_p_lower_bound(0.0, 4096), ValidationError);
  CHECK_THROWS_AS(unknown_p_lower_bound(-1.0, 4096), ValidationError);
  CHECK_THROWS_AS(unknown_p_lower_bound(1.0, 0), ValidationError);
}

}  // TEST_SUITE("adversary")
