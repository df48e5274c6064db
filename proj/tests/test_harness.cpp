#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cdsched/harness.hpp"
#include "cdsched/energy_model.hpp"

using namespace cdsched;

namespace {

std::string emit_to_string(const std::vector<CrReport>& reports,
                           OutputFormat format) {
  std::ostringstream out;
  emit_results(reports, format, out);
  return out.str();
}

// A hand-built report whose fields are exactly representable decimals, so
// the 9-significant-digit formatting is predictable byte for byte.
CrReport crafted_report() {
  CrReport r;
  r.sweep_value = 2.0;
  r.mean_cr = 1.25;
  r.p95_cr = 1.5;
  r.max_cr = 1.75;
  r.bound_natural = 1.0625;
  r.bound_base2 = 2.0;
  r.trials = 10;
  return r;
}

ExperimentConfig small_no_eh_config() {
  ExperimentConfig config;
  config.mode = SweepMode::no_eh;
  config.sweep_variable = SweepVariable::packet_count;
  config.sweep_values = {2.0, 3.0};
  config.trials_per_point = 5;
  config.base_instance.packet_count = 2;
  config.base_instance.deadline = 100.0;
  config.base_instance.link.bits_per_packet = 0.05;
  config.workload.seed = 404;
  return config;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("csv emission matches the golden bytes") {
  const std::string expected =
      "sweep_value,mean_cr,p95_cr,max_cr,bound_natural,bound_base2,trials\n"
      "2,1.25,1.5,1.75,1.0625,2,10\n";
  CHECK(emit_to_string({crafted_report()}, OutputFormat::csv) == expected);
}

TEST_CASE("json emission matches the golden bytes, metadata included") {
  CrReport report = crafted_report();
  report.mode_metadata["kind"] = "lower_bound";
  const std::string expected =
      "[\n"
      "  {\"sweep_value\": 2, \"mean_cr\": 1.25, \"p95_cr\": 1.5, "
      "\"max_cr\": 1.75, \"bound_natural\": 1.0625, \"bound_base2\": 2, "
      "\"trials\": 10, \"mode_metadata\": {\"kind\": \"lower_bound\"}}\n"
      "]\n";
  CHECK(emit_to_string({report}, OutputFormat::json) == expected);
}

TEST_CASE("empty report lists emit a bare header or bare array") {
  CHECK(emit_to_string({}, OutputFormat::csv) ==
        "sweep_value,mean_cr,p95_cr,max_cr,bound_natural,bound_base2,trials\n");
  CHECK(emit_to_string({}, OutputFormat::json) == "[\n]\n");
}

TEST_CASE("json output survives a parse round-trip") {
  CrReport report = crafted_report();
  report.mode_metadata["note"] = "quotes \" and \\ backslashes";
  const std::vector<CrReport> parsed =
      parse_reports_json(emit_to_string({report}, OutputFormat::json));
  REQUIRE(parsed.size() == 1);
  CHECK(parsed[0].sweep_value == report.sweep_value);
  CHECK(parsed[0].mean_cr == report.mean_cr);
  CHECK(parsed[0].p95_cr == report.p95_cr);
  CHECK(parsed[0].max_cr == report.max_cr);
  CHECK(parsed[0].bound_natural == report.bound_natural);
  CHECK(parsed[0].bound_base2 == report.bound_base2);
  CHECK(parsed[0].trials == report.trials);
  CHECK(parsed[0].mode_metadata.at("note") == report.mode_metadata.at("note"));
}

TEST_CASE("report parsing rejects non-arrays and garbage") {
  CHECK_THROWS_AS(parse_reports_json("{}"), ValidationError);
  CHECK_THROWS(parse_reports_json("not json at all"));
}

TEST_CASE("sweeps are deterministic: identical configs, identical bytes") {
  const ExperimentConfig config = small_no_eh_config();
  const std::vector<CrReport> first = run_sweep(config);
  const std::vector<CrReport> second = run_sweep(config);
  CHECK(emit_to_string(first, OutputFormat::csv) ==
        emit_to_string(second, OutputFormat::csv));
  CHECK(emit_to_string(first, OutputFormat::json) ==
        emit_to_string(second, OutputFormat::json));
}

TEST_CASE("aggregates are ordered and bounded per report") {
  const std::vector<CrReport> reports = run_sweep(small_no_eh_config());
  REQUIRE(reports.size() == 2);
  for (const CrReport& r : reports) {
    CHECK(r.trials == 5);
    CHECK(r.mean_cr >= 1.0 - 1e-9);
    CHECK(r.mean_cr <= r.p95_cr + 1e-15);
    CHECK(r.p95_cr <= r.max_cr + 1e-15);
    CHECK(r.max_cr <= r.bound_natural);
    CHECK(r.bound_natural ==
          doctest::Approx(1.0 + std::log(r.sweep_value)).epsilon(1e-12));
    CHECK(r.bound_base2 ==
          doctest::Approx(1.0 + std::log2(r.sweep_value)).epsilon(1e-12));
  }
}

TEST_CASE("eh sweep with zero harvest reproduces the grid-only rows") {
  ExperimentConfig grid_only = small_no_eh_config();
  ExperimentConfig eh = grid_only;
  eh.mode = SweepMode::eh;
  eh.workload.harvest_epoch_count = 0;

  // Same per-trial seeds, zero harvest: the surrogate degenerates to the
  // plain competitive ratio, so the CSV rows (which omit metadata) match
  // byte for byte.
  CHECK(emit_to_string(run_sweep(grid_only), OutputFormat::csv) ==
        emit_to_string(run_sweep(eh), OutputFormat::csv));
}

TEST_CASE("a harvesting sweep reports the assumption metadata") {
  ExperimentConfig config = small_no_eh_config();
  config.mode = SweepMode::eh;
  config.sweep_values = {4.0};
  config.trials_per_point = 10;
  config.workload.harvest_epoch_count = 3;
  config.workload.harvest_amount_mean = 1e-4;

  const std::vector<CrReport> reports = run_sweep(config);
  REQUIRE(reports.size() == 1);
  const auto& meta = reports[0].mode_metadata;
  CHECK(meta.at("surrogate") == "upper_bound");
  CHECK(meta.at("degenerate_trials") == "0");
  CHECK(std::stod(meta.at("eta_hat")) >= 0.0);
  CHECK(std::stod(meta.at("assumption_m")) >= 1.0);
  CHECK(reports[0].mean_cr <= std::stod(meta.at("margin_bound")) + 1e-9);
}

TEST_CASE("a sweep point where harvest always covers the optimum fails") {
  ExperimentConfig config = small_no_eh_config();
  config.mode = SweepMode::eh;
  config.sweep_values = {2.0};
  config.trials_per_point = 2;
  config.workload.harvest_epoch_count = 2;
  config.workload.harvest_amount_mean = 1e6;
  CHECK_THROWS_AS(run_sweep(config), ValidationError);
}

TEST_CASE("worst-case mode returns one searched ratio per point") {
  ExperimentConfig config;
  config.mode = SweepMode::worst_case;
  config.sweep_variable = SweepVariable::packet_count;
  config.sweep_values = {2.0};
  config.base_instance.deadline = 1.0;
  config.search.restarts = 2;
  config.search.max_iters = 60;
  config.search.seed = 9;

  const std::vector<CrReport> reports = run_sweep(config);
  REQUIRE(reports.size() == 1);
  CHECK(reports[0].trials == 2);  // reported as the restart count
  CHECK(reports[0].mean_cr == reports[0].max_cr);
  CHECK(reports[0].max_cr <= reports[0].bound_natural + 1e-9);
  CHECK(reports[0].mode_metadata.count("converged") == 1);
  CHECK(std::stod(reports[0].mode_metadata.at("transformed_cr")) >=
        reports[0].max_cr - 1e-9);
}

TEST_CASE("remark1 mode reports the hidden-count lower bound") {
  ExperimentConfig config;
  config.mode = SweepMode::remark1;
  config.sweep_variable = SweepVariable::packet_bits;
  config.sweep_values = {1.0, 2.0};
  config.remark1_grid = 512;

  const std::vector<CrReport> reports = run_sweep(config);
  REQUIRE(reports.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    const double direct =
        unknown_p_lower_bound(config.sweep_values[i], config.remark1_grid);
    CHECK(reports[i].mean_cr == direct);
    CHECK(reports[i].max_cr == direct);
    CHECK(reports[i].trials == 1);
    CHECK(reports[i].mode_metadata.at("b0_grid") == "512");
    CHECK(reports[i].mode_metadata.at("kind") == "lower_bound");
  }
  CHECK(reports[1].mean_cr > reports[0].mean_cr);
}

TEST_CASE("config loader populates every documented key") {
  const std::string text = R"({
    "mode": "eh",
    "sweep_variable": "harvest_mean",
    "sweep_values": [0.01, 0.02],
    "trials_per_point": 7,
    "base_instance": {
      "packet_count": 4,
      "deadline": 50.0,
      "bits_per_packet": 0.5,
      "noise_density": 2.0,
      "bandwidth": 3.0
    },
    "workload": {
      "arrival_mean": 12.5,
      "harvest_epoch_count": 6,
      "harvest_epoch_mean_gap": 7.0,
      "harvest_amount_mean": 0.25,
      "seed": 99
    },
    "search": {
      "restarts": 3,
      "step_size": 0.2,
      "fd_epsilon": 1e-5,
      "max_iters": 111,
      "seed": 5
    },
    "remark1_grid": 256,
    "output_path": "out.csv"
  })";
  const ExperimentConfig config = load_experiment_config(text);
  CHECK(config.mode == SweepMode::eh);
  CHECK(config.sweep_variable == SweepVariable::harvest_mean);
  CHECK(config.sweep_values == std::vector<double>{0.01, 0.02});
  CHECK(config.trials_per_point == 7);
  CHECK(config.base_instance.packet_count == 4);
  CHECK(config.base_instance.deadline == 50.0);
  CHECK(config.base_instance.link.bits_per_packet == 0.5);
  CHECK(config.base_instance.link.noise_density == 2.0);
  CHECK(config.base_instance.link.bandwidth == 3.0);
  CHECK(config.workload.arrival_mean == 12.5);
  CHECK(config.workload.harvest_epoch_count == 6);
  CHECK(config.workload.harvest_epoch_mean_gap == 7.0);
  CHECK(config.workload.harvest_amount_mean == 0.25);
  CHECK(config.workload.seed == 99);
  CHECK(config.search.restarts == 3);
  CHECK(config.search.step_size == 0.2);
  CHECK(config.search.fd_epsilon == 1e-5);
  CHECK(config.search.max_iters == 111);
  CHECK(config.search.seed == 5);
  CHECK(config.remark1_grid == 256);
  CHECK(config.output_path == "out.csv");
}

TEST_CASE("config loader rejects typos and malformed input") {
  const auto expect_bad = [](const std::string& text) {
    try {
      load_experiment_config(text);
      FAIL("expected rejection of: " << text);
    } catch (const ValidationError& e) {
      CHECK(e.kind() == ValidationError::Kind::bad_config);
    }
  };
  expect_bad(R"({"sweep_values": [2], "mod": "eh"})");
  expect_bad(R"({"sweep_values": [2], "base_instance": {"packets": 3}})");
  expect_bad(R"({"sweep_values": [2], "workload": {"sed": 1}})");
  expect_bad(R"({"sweep_values": [2], "search": {"iters": 3}})");
  expect_bad(R"({"mode": "no_eh"})");              // sweep_values missing
  expect_bad(R"({"sweep_values": [2], "mode": "offline"})");
  expect_bad(R"({"sweep_values": [2], "sweep_variable": "packets"})");
  expect_bad("[1, 2, 3]");
  expect_bad("{ this is not json");
}

TEST_CASE("sweep validation rejects inconsistent experiments") {
  const auto expect_bad = [](ExperimentConfig config) {
    try {
      run_sweep(config);
      FAIL("expected the sweep to be rejected");
    } catch (const ValidationError& e) {
      CHECK(e.kind() == ValidationError::Kind::bad_config);
    }
  };

  ExperimentConfig config = small_no_eh_config();
  config.sweep_values.clear();
  expect_bad(config);

  config = small_no_eh_config();
  config.trials_per_point = 0;
  expect_bad(config);

  config = small_no_eh_config();
  config.sweep_variable = SweepVariable::harvest_mean;  // needs eh mode
  expect_bad(config);

  config = small_no_eh_config();
  config.sweep_values = {2.5};  // packet counts must be integers
  expect_bad(config);

  config = small_no_eh_config();
  config.mode = SweepMode::remark1;  // remark1 sweeps packet_bits
  expect_bad(config);

  config = small_no_eh_config();
  config.mode = SweepMode::worst_case;
  config.search.step_size = 0.0;  // search config is validated up front
  expect_bad(config);
}

TEST_CASE("generator failures carry the sweep point and trial index") {
  ExperimentConfig config = small_no_eh_config();
  config.sweep_values = {5.0};
  config.workload.arrival_mean = 1e8;
  try {
    run_sweep(config);
    FAIL("expected a generation failure");
  } catch (const GenerationError& e) {
    const std::string what = e.what();
    CHECK(what.find("sweep point 0") != std::string::npos);
    CHECK(what.find("trial 0") != std::string::npos);
  }
}

TEST_CASE("file emission writes the same bytes as stream emission") {
  const std::vector<CrReport> reports = {crafted_report()};
  const std::filesystem::path path =
      std::filesystem::temp_directory_path() / "cdsched_harness_roundtrip.csv";
  emit_results_to_file(reports, OutputFormat::csv, path.string());

  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream content;
  content << in.rdbuf();
  CHECK(content.str() == emit_to_string(reports, OutputFormat::csv));
  in.close();
  std::filesystem::remove(path);
}

TEST_CASE("file errors surface as stream failures") {
  CHECK_THROWS_AS(
      emit_results_to_file({}, OutputFormat::csv,
                           "/nonexistent-dir-cdsched/out.csv"),
      std::ios_base::failure);
  CHECK_THROWS_AS(load_experiment_config_file("/nonexistent-dir-cdsched/c.json"),
                  std::ios_base::failure);
}

TEST_CASE("mode and variable names round-trip through to_string") {
  CHECK(to_string(SweepMode::no_eh) == "no_eh");
  CHECK(to_string(SweepMode::eh) == "eh");
  CHECK(to_string(SweepMode::worst_case) == "worst_case");
  CHECK(to_string(SweepMode::remark1) == "remark1");
  CHECK(to_string(SweepVariable::packet_count) == "packet_count");
  CHECK(to_string(SweepVariable::deadline) == "deadline");
  CHECK(to_string(SweepVariable::packet_bits) == "packet_bits");
  CHECK(to_string(SweepVariable::harvest_mean) == "harvest_mean");
  CHECK(to_string(SweepVariable::harvest_epochs) == "harvest_epochs");
}

}  // TEST_SUITE("harness")
