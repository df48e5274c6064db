#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cdsched/adversary.hpp"
#include "cdsched/energy_model.hpp"
#include "cdsched/workload.hpp"

namespace cdsched {

enum class SweepVariable {
  packet_count,
  deadline,
  packet_bits,
  harvest_mean,
  harvest_epochs,
};

enum class SweepMode {
  no_eh,       ///< Monte-Carlo competitive ratios, grid power only
  eh,          ///< Monte-Carlo grid-ratio surrogate with harvesting
  worst_case,  ///< adversarial search per sweep point
  remark1,     ///< unknown-packet-count lower bound per sweep point
};

/// One experiment: hold `base_instance`/`workload` fixed except for the
/// swept variable, run `trials_per_point` seeded trials per value.
struct ExperimentConfig {
  SweepMode mode = SweepMode::no_eh;
  SweepVariable sweep_variable = SweepVariable::packet_count;
  std::vector<double> sweep_values;
  std::size_t trials_per_point = 1;
  ProblemInstance base_instance;
  WorkloadSpec workload;
  SearchConfig search;           ///< worst_case mode only
  std::size_t remark1_grid = 4096;  ///< remark1 mode only
  std::string output_path;       ///< optional; empty = stdout
};

/// Aggregated competitive ratios at one sweep point. p95 is nearest-rank.
/// bound_natural = 1 + ln P is the guarantee the schedulers are held to;
/// bound_base2 = 1 + log2 P is reported for comparison only.
struct CrReport {
  double sweep_value = 0.0;
  double mean_cr = 1.0;
  double p95_cr = 1.0;
  double max_cr = 1.0;
  double bound_natural = 1.0;
  double bound_base2 = 1.0;
  std::size_t trials = 0;
  std::map<std::string, std::string> mode_metadata;
};

/// Per-trial seeds derive from (seed, point index, trial index), so reports
/// are reproducible and trials are independent. Generator failures are
/// rethrown with the sweep point and trial index attached.
std::vector<CrReport> run_sweep(const ExperimentConfig& config);

enum class OutputFormat { csv, json };

/// CSV columns, in order:
/// sweep_value,mean_cr,p95_cr,max_cr,bound_natural,bound_base2,trials.
/// JSON mirrors them plus mode_metadata. Floats carry 9 significant digits
/// and the bytes depend only on the reports, never on time or environment.
void emit_results(const std::vector<CrReport>& reports, OutputFormat format,
                  std::ostream& out);
void emit_results_to_file(const std::vector<CrReport>& reports,
                          OutputFormat format, const std::string& path);

std::vector<CrReport> parse_reports_json(const std::string& text);

/// Reads an ExperimentConfig from its JSON form (see README for the
/// schema). Unknown keys are rejected to catch typos.
ExperimentConfig load_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config_file(const std::string& path);

std::string to_string(SweepMode mode);
std::string to_string(SweepVariable variable);

}  // namespace cdsched
