#include "cdsched/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "cdsched/eh_scheduler.hpp"
#include "cdsched/offline_opt.hpp"
#include "cdsched/online_on.hpp"
#include "cdsched/rng.hpp"

namespace cdsched {

namespace {

using nlohmann::json;

ValidationError bad_config(const std::string& message) {
  return ValidationError(ValidationError::Kind::bad_config, message);
}

// All floats in reports and report metadata carry exactly 9 significant
// digits so emission is byte-stable across runs and platforms.
std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.9g", value);
  return buffer;
}

std::string escape_json(const std::string& raw) {
  std::string out;
  out.reserve(raw.size() + 8);
  for (char c : raw) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

// Nearest-rank 95th percentile of an unsorted sample.
double percentile95(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t rank = static_cast<std::size_t>(
      std::ceil(0.95 * static_cast<double>(values.size())));
  return values[std::max<std::size_t>(rank, 1) - 1];
}

// (point, trial) -> substream of the experiment seed. Point and trial are
// offset so the derivation never collides with the generators' own
// substream tags.
std::uint64_t trial_seed(std::uint64_t seed, std::size_t point,
                         std::size_t trial) {
  return mix_seed(mix_seed(seed, 0x10000 + point), trial);
}

struct PointSetup {
  ProblemInstance instance;
  WorkloadSpec workload;
};

PointSetup apply_sweep_value(const ExperimentConfig& config, double value) {
  PointSetup setup{config.base_instance, config.workload};
  switch (config.sweep_variable) {
    case SweepVariable::packet_count: {
      const double rounded = std::round(value);
      if (!(rounded >= 1.0) || std::abs(rounded - value) > 1e-9) {
        throw bad_config("packet_count sweep values must be positive integers");
      }
      setup.instance.packet_count = static_cast<std::size_t>(rounded);
      break;
    }
    case SweepVariable::deadline:
      setup.instance.deadline = value;
      break;
    case SweepVariable::packet_bits:
      setup.instance.link.bits_per_packet = value;
      break;
    case SweepVariable::harvest_mean:
      setup.workload.harvest_amount_mean = value;
      break;
    case SweepVariable::harvest_epochs: {
      const double rounded = std::round(value);
      if (!(rounded >= 0.0) || std::abs(rounded - value) > 1e-9) {
        throw bad_config(
            "harvest_epochs sweep values must be non-negative integers");
      }
      setup.workload.harvest_epoch_count = static_cast<std::size_t>(rounded);
      break;
    }
  }
  validate_instance(setup.instance);
  return setup;
}

CrReport aggregate(double sweep_value, const std::vector<double>& ratios,
                   std::size_t packet_count) {
  CrReport report;
  report.sweep_value = sweep_value;
  report.trials = ratios.size();
  report.bound_natural = 1.0 + std::log(static_cast<double>(packet_count));
  report.bound_base2 = 1.0 + std::log2(static_cast<double>(packet_count));
  double sum = 0.0;
  double max = ratios.front();
  for (double r : ratios) {
    sum += r;
    max = std::max(max, r);
  }
  report.mean_cr = sum / static_cast<double>(ratios.size());
  report.max_cr = max;
  report.p95_cr = percentile95(ratios);
  return report;
}

[[noreturn]] void rethrow_with_context(const std::exception& error,
                                       std::size_t point, std::size_t trial) {
  std::ostringstream msg;
  msg << "sweep point " << point << ", trial " << trial << ": " << error.what();
  throw GenerationError(msg.str());
}

CrReport run_monte_carlo_point(const ExperimentConfig& config,
                               std::size_t point, double value) {
  const PointSetup setup = apply_sweep_value(config, value);
  const bool with_harvest = config.mode == SweepMode::eh;
  std::vector<double> ratios;
  ratios.reserve(config.trials_per_point);
  std::vector<double> opt_energies;
  double harvest_total_sum = 0.0;
  std::size_t degenerate = 0;

  for (std::size_t trial = 0; trial < config.trials_per_point; ++trial) {
    WorkloadSpec wl = setup.workload;
    wl.seed = trial_seed(config.workload.seed, point, trial);
    try {
      const ArrivalSequence arrivals = gen_arrivals(setup.instance, wl);
      if (!with_harvest) {
        ratios.push_back(competitive_ratio(arrivals, setup.instance));
        continue;
      }
      const HarvestProfile harvest = gen_harvest(setup.instance, wl);
      double total = harvest.initial_charge;
      for (const HarvestEvent& ev : harvest.events) total += ev.amount;
      if (!eh_nondegeneracy_check(arrivals, harvest, setup.instance)) {
        // Harvest covers the optimum: the surrogate is undefined, so the
        // trial is skipped and counted instead of poisoning the aggregate.
        ++degenerate;
        continue;
      }
      ratios.push_back(grid_cr_surrogate(arrivals, harvest, setup.instance));
      opt_energies.push_back(total_energy(
          opt_schedule(arrivals, setup.instance), setup.instance.link));
      harvest_total_sum += total;
    } catch (const GenerationError& error) {
      rethrow_with_context(error, point, trial);
    } catch (const EnergyOverflowError& error) {
      rethrow_with_context(error, point, trial);
    }
  }

  if (ratios.empty()) {
    throw bad_config("every trial at a sweep point was degenerate");
  }
  CrReport report = aggregate(value, ratios, setup.instance.packet_count);
  if (with_harvest) {
    report.mode_metadata["surrogate"] = "upper_bound";
    report.mode_metadata["degenerate_trials"] = std::to_string(degenerate);
    // Empirical mean half-window energy: each half of the horizon carries
    // half the expected harvest.
    const double eta =
        harvest_total_sum / (2.0 * static_cast<double>(ratios.size()));
    report.mode_metadata["eta_hat"] = format_double(eta);
    try {
      double worst_m = 1.0;
      double worst_bound = report.bound_natural;
      for (double opt_energy : opt_energies) {
        const AssumptionMargin margin = margin_from_energy(
            opt_energy, eta, setup.instance.packet_count);
        if (margin.m > worst_m) {
          worst_m = margin.m;
          worst_bound = margin.cr_bound;
        }
      }
      report.mode_metadata["assumption_m"] = format_double(worst_m);
      report.mode_metadata["margin_bound"] = format_double(worst_bound);
    } catch (const AssumptionUnsatisfiableError&) {
      report.mode_metadata["assumption_m"] = "unsatisfiable";
    }
  }
  return report;
}

CrReport run_worst_case_point(const ExperimentConfig& config, std::size_t point,
                              double value) {
  const PointSetup setup = apply_sweep_value(config, value);
  SearchConfig search = config.search;
  search.seed = trial_seed(search.seed, point, 0);
  const SearchResult result = worst_case_search(setup.instance, search);
  CrReport report = aggregate(value, {result.cr}, setup.instance.packet_count);
  report.trials = config.search.restarts;
  report.mode_metadata["converged"] = result.converged ? "true" : "false";
  report.mode_metadata["transformed_cr"] = format_double(result.transformed_cr);
  return report;
}

CrReport run_remark1_point(const ExperimentConfig& config, double value) {
  const double bound = unknown_p_lower_bound(value, config.remark1_grid);
  // The construction plays P in {1, 2}, so the comparison bound uses P = 2.
  CrReport report = aggregate(value, {bound}, 2);
  report.trials = 1;
  report.mode_metadata["b0_grid"] = std::to_string(config.remark1_grid);
  report.mode_metadata["kind"] = "lower_bound";
  return report;
}

void validate_config(const ExperimentConfig& config) {
  validate_instance(config.base_instance);
  validate_workload(config.workload);
  if (config.sweep_values.empty()) {
    throw bad_config("sweep_values must not be empty");
  }
  if (config.trials_per_point == 0) {
    throw bad_config("trials_per_point must be at least 1");
  }
  const bool harvest_sweep =
      config.sweep_variable == SweepVariable::harvest_mean ||
      config.sweep_variable == SweepVariable::harvest_epochs;
  if (harvest_sweep && config.mode != SweepMode::eh) {
    throw bad_config("harvest sweeps only make sense in eh mode");
  }
  if (config.mode == SweepMode::worst_case) {
    validate_search_config(config.search);
  }
  if (config.mode == SweepMode::remark1) {
    if (config.sweep_variable != SweepVariable::packet_bits) {
      throw bad_config("remark1 mode sweeps packet_bits");
    }
    if (config.remark1_grid == 0) {
      throw bad_config("remark1_grid must be at least 1");
    }
  }
}

}  // namespace

std::vector<CrReport> run_sweep(const ExperimentConfig& config) {
  validate_config(config);
  std::vector<CrReport> reports;
  reports.reserve(config.sweep_values.size());
  for (std::size_t point = 0; point < config.sweep_values.size(); ++point) {
    const double value = config.sweep_values[point];
    switch (config.mode) {
      case SweepMode::no_eh:
      case SweepMode::eh:
        reports.push_back(run_monte_carlo_point(config, point, value));
        break;
      case SweepMode::worst_case:
        reports.push_back(run_worst_case_point(config, point, value));
        break;
      case SweepMode::remark1:
        reports.push_back(run_remark1_point(config, value));
        break;
    }
  }
  return reports;
}

void emit_results(const std::vector<CrReport>& reports, OutputFormat format,
                  std::ostream& out) {
  if (format == OutputFormat::csv) {
    out << "sweep_value,mean_cr,p95_cr,max_cr,bound_natural,bound_base2,trials\n";
    for (const CrReport& r : reports) {
      out << format_double(r.sweep_value) << ',' << format_double(r.mean_cr)
          << ',' << format_double(r.p95_cr) << ',' << format_double(r.max_cr)
          << ',' << format_double(r.bound_natural) << ','
          << format_double(r.bound_base2) << ',' << r.trials << '\n';
    }
    return;
  }
  out << "[\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const CrReport& r = reports[i];
    out << "  {\"sweep_value\": " << format_double(r.sweep_value)
        << ", \"mean_cr\": " << format_double(r.mean_cr)
        << ", \"p95_cr\": " << format_double(r.p95_cr)
        << ", \"max_cr\": " << format_double(r.max_cr)
        << ", \"bound_natural\": " << format_double(r.bound_natural)
        << ", \"bound_base2\": " << format_double(r.bound_base2)
        << ", \"trials\": " << r.trials << ", \"mode_metadata\": {";
    bool first = true;
    for (const auto& [key, val] : r.mode_metadata) {
      if (!first) out << ", ";
      first = false;
      out << '"' << escape_json(key) << "\": \"" << escape_json(val) << '"';
    }
    out << "}}" << (i + 1 < reports.size() ? "," : "") << '\n';
  }
  out << "]\n";
}

void emit_results_to_file(const std::vector<CrReport>& reports,
                          OutputFormat format, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::ios_base::failure("cannot open output file: " + path);
  }
  emit_results(reports, format, out);
  out.flush();
  if (!out) {
    throw std::ios_base::failure("failed writing output file: " + path);
  }
}

std::vector<CrReport> parse_reports_json(const std::string& text) {
  const json parsed = json::parse(text);
  if (!parsed.is_array()) {
    throw bad_config("report JSON must be an array");
  }
  std::vector<CrReport> reports;
  reports.reserve(parsed.size());
  for (const json& item : parsed) {
    CrReport r;
    r.sweep_value = item.at("sweep_value").get<double>();
    r.mean_cr = item.at("mean_cr").get<double>();
    r.p95_cr = item.at("p95_cr").get<double>();
    r.max_cr = item.at("max_cr").get<double>();
    r.bound_natural = item.at("bound_natural").get<double>();
    r.bound_base2 = item.at("bound_base2").get<double>();
    r.trials = item.at("trials").get<std::size_t>();
    if (item.contains("mode_metadata")) {
      for (const auto& [key, val] : item.at("mode_metadata").items()) {
        r.mode_metadata[key] = val.get<std::string>();
      }
    }
    reports.push_back(std::move(r));
  }
  return reports;
}

std::string to_string(SweepMode mode) {
  switch (mode) {
    case SweepMode::no_eh: return "no_eh";
    case SweepMode::eh: return "eh";
    case SweepMode::worst_case: return "worst_case";
    case SweepMode::remark1: return "remark1";
  }
  return "unknown";
}

std::string to_string(SweepVariable variable) {
  switch (variable) {
    case SweepVariable::packet_count: return "packet_count";
    case SweepVariable::deadline: return "deadline";
    case SweepVariable::packet_bits: return "packet_bits";
    case SweepVariable::harvest_mean: return "harvest_mean";
    case SweepVariable::harvest_epochs: return "harvest_epochs";
  }
  return "unknown";
}

namespace {

SweepMode mode_from_string(const std::string& raw) {
  if (raw == "no_eh") return SweepMode::no_eh;
  if (raw == "eh") return SweepMode::eh;
  if (raw == "worst_case") return SweepMode::worst_case;
  if (raw == "remark1") return SweepMode::remark1;
  throw bad_config("unknown mode: " + raw);
}

SweepVariable variable_from_string(const std::string& raw) {
  if (raw == "packet_count") return SweepVariable::packet_count;
  if (raw == "deadline") return SweepVariable::deadline;
  if (raw == "packet_bits") return SweepVariable::packet_bits;
  if (raw == "harvest_mean") return SweepVariable::harvest_mean;
  if (raw == "harvest_epochs") return SweepVariable::harvest_epochs;
  throw bad_config("unknown sweep_variable: " + raw);
}

void reject_unknown_keys(const json& object,
                         std::initializer_list<const char*> known,
                         const std::string& where) {
  for (const auto& [key, value] : object.items()) {
    (void)value;
    bool ok = false;
    for (const char* k : known) {
      if (key == k) {
        ok = true;
        break;
      }
    }
    if (!ok) throw bad_config("unknown key \"" + key + "\" in " + where);
  }
}

}  // namespace

ExperimentConfig load_experiment_config(const std::string& json_text) {
  json parsed;
  try {
    parsed = json::parse(json_text);
  } catch (const json::parse_error& error) {
    throw bad_config(std::string("config is not valid JSON: ") + error.what());
  }
  if (!parsed.is_object()) throw bad_config("config must be a JSON object");
  reject_unknown_keys(parsed,
                      {"mode", "sweep_variable", "sweep_values",
                       "trials_per_point", "base_instance", "workload",
                       "search", "remark1_grid", "output_path"},
                      "config");

  ExperimentConfig config;
  if (parsed.contains("mode")) {
    config.mode = mode_from_string(parsed.at("mode").get<std::string>());
  }
  if (parsed.contains("sweep_variable")) {
    config.sweep_variable =
        variable_from_string(parsed.at("sweep_variable").get<std::string>());
  }
  if (!parsed.contains("sweep_values")) {
    throw bad_config("config needs sweep_values");
  }
  config.sweep_values = parsed.at("sweep_values").get<std::vector<double>>();
  if (parsed.contains("trials_per_point")) {
    config.trials_per_point = parsed.at("trials_per_point").get<std::size_t>();
  }
  if (parsed.contains("base_instance")) {
    const json& inst = parsed.at("base_instance");
    reject_unknown_keys(inst,
                        {"packet_count", "deadline", "bits_per_packet",
                         "noise_density", "bandwidth"},
                        "base_instance");
    if (inst.contains("packet_count")) {
      config.base_instance.packet_count =
          inst.at("packet_count").get<std::size_t>();
    }
    if (inst.contains("deadline")) {
      config.base_instance.deadline = inst.at("deadline").get<double>();
    }
    if (inst.contains("bits_per_packet")) {
      config.base_instance.link.bits_per_packet =
          inst.at("bits_per_packet").get<double>();
    }
    if (inst.contains("noise_density")) {
      config.base_instance.link.noise_density =
          inst.at("noise_density").get<double>();
    }
    if (inst.contains("bandwidth")) {
      config.base_instance.link.bandwidth = inst.at("bandwidth").get<double>();
    }
  }
  if (parsed.contains("workload")) {
    const json& wl = parsed.at("workload");
    reject_unknown_keys(wl,
                        {"arrival_mean", "harvest_epoch_count",
                         "harvest_epoch_mean_gap", "harvest_amount_mean",
                         "seed"},
                        "workload");
    if (wl.contains("arrival_mean")) {
      config.workload.arrival_mean = wl.at("arrival_mean").get<double>();
    }
    if (wl.contains("harvest_epoch_count")) {
      config.workload.harvest_epoch_count =
          wl.at("harvest_epoch_count").get<std::size_t>();
    }
    if (wl.contains("harvest_epoch_mean_gap")) {
      config.workload.harvest_epoch_mean_gap =
          wl.at("harvest_epoch_mean_gap").get<double>();
    }
    if (wl.contains("harvest_amount_mean")) {
      config.workload.harvest_amount_mean =
          wl.at("harvest_amount_mean").get<double>();
    }
    if (wl.contains("seed")) {
      config.workload.seed = wl.at("seed").get<std::uint64_t>();
    }
  }
  if (parsed.contains("search")) {
    const json& search = parsed.at("search");
    reject_unknown_keys(
        search, {"restarts", "step_size", "fd_epsilon", "max_iters", "seed"},
        "search");
    if (search.contains("restarts")) {
      config.search.restarts = search.at("restarts").get<std::size_t>();
    }
    if (search.contains("step_size")) {
      config.search.step_size = search.at("step_size").get<double>();
    }
    if (search.contains("fd_epsilon")) {
      config.search.fd_epsilon = search.at("fd_epsilon").get<double>();
    }
    if (search.contains("max_iters")) {
      config.search.max_iters = search.at("max_iters").get<std::size_t>();
    }
    if (search.contains("seed")) {
      config.search.seed = search.at("seed").get<std::uint64_t>();
    }
  }
  if (parsed.contains("remark1_grid")) {
    config.remark1_grid = parsed.at("remark1_grid").get<std::size_t>();
  }
  if (parsed.contains("output_path")) {
    config.output_path = parsed.at("output_path").get<std::string>();
  }
  return config;
}

ExperimentConfig load_experiment_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::ios_base::failure("cannot open config file: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_experiment_config(buffer.str());
}

}  // namespace cdsched
