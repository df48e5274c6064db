// Command-line front end: schedule a sequence from a file (opt/on/eh),
// report a single competitive ratio (cr), drive Monte-Carlo sweeps (sweep),
// search for bad inputs (worst-case), evaluate the unknown-count lower
// bound (remark1), and run the invariant suites (check).
//
// Exit codes: 0 success, 1 validation error, 2 invariant-suite failure,
// 3 I/O error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cdsched/adversary.hpp"
#include "cdsched/eh_scheduler.hpp"
#include "cdsched/energy_model.hpp"
#include "cdsched/harness.hpp"
#include "cdsched/offline_opt.hpp"
#include "cdsched/online_on.hpp"
#include "cdsched/property_suite.hpp"

namespace {

using nlohmann::json;

/// Filesystem problems get their own exit code, so they need their own type.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& message) : std::runtime_error(message) {}
};

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.9g", value);
  return buffer;
}

// ---- input ---------------------------------------------------------------

/// One non-negative decimal per line: the inter-arrival gaps a_1..a_P
/// (a_P being the tail gap up to the deadline). "-" or "" means stdin.
std::vector<double> read_gaps(const std::string& path) {
  std::istream* in = &std::cin;
  std::ifstream file;
  if (!path.empty() && path != "-") {
    file.open(path);
    if (!file) throw IoError("cannot open arrival file: " + path);
    in = &file;
  }
  std::vector<double> gaps;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(*in, line)) {
    ++line_no;
    const std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos) continue;  // blank line
    if (line[start] == '#') continue;          // comment
    std::size_t consumed = 0;
    double value = 0.0;
    try {
      value = std::stod(line.substr(start), &consumed);
    } catch (const std::exception&) {
      throw cdsched::ValidationError(
          cdsched::ValidationError::Kind::bad_config,
          "arrival file line " + std::to_string(line_no) +
              " is not a number: " + line);
    }
    const std::size_t rest = line.find_first_not_of(" \t\r", start + consumed);
    if (rest != std::string::npos) {
      throw cdsched::ValidationError(
          cdsched::ValidationError::Kind::bad_config,
          "arrival file line " + std::to_string(line_no) +
              " has trailing characters: " + line);
    }
    gaps.push_back(value);
  }
  if (gaps.empty()) {
    throw cdsched::ValidationError(cdsched::ValidationError::Kind::bad_config,
                                   "arrival input is empty");
  }
  return gaps;
}

/// Harvest profile file: {"battery_capacity": J, "initial_charge": J,
/// "events": [{"time": s, "amount": J}, ...]}.
cdsched::HarvestProfile read_harvest(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open harvest file: " + path);
  std::stringstream buffer;
  buffer << file.rdbuf();
  json parsed;
  try {
    parsed = json::parse(buffer.str());
  } catch (const json::exception& error) {
    throw cdsched::ValidationError(
        cdsched::ValidationError::Kind::bad_harvest,
        std::string("harvest file is not valid JSON: ") + error.what());
  }
  if (!parsed.is_object()) {
    throw cdsched::ValidationError(cdsched::ValidationError::Kind::bad_harvest,
                                   "harvest file must hold a JSON object");
  }
  cdsched::HarvestProfile profile;
  for (const auto& [key, value] : parsed.items()) {
    if (key == "battery_capacity") {
      profile.battery_capacity = value.get<double>();
    } else if (key == "initial_charge") {
      profile.initial_charge = value.get<double>();
    } else if (key == "events") {
      for (const json& entry : value) {
        cdsched::HarvestEvent ev;
        ev.time = entry.at("time").get<double>();
        ev.amount = entry.at("amount").get<double>();
        profile.events.push_back(ev);
      }
    } else {
      throw cdsched::ValidationError(
          cdsched::ValidationError::Kind::bad_harvest,
          "unknown key \"" + key + "\" in harvest file");
    }
  }
  return profile;
}

// ---- output --------------------------------------------------------------

/// Opens `path` for writing and runs `writer` on it; empty path -> stdout.
void with_output(const std::string& path,
                 const std::function<void(std::ostream&)>& writer) {
  if (path.empty()) {
    writer(std::cout);
    if (!std::cout) throw IoError("failed writing to stdout");
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open output file: " + path);
  writer(out);
  out.flush();
  if (!out) throw IoError("failed writing output file: " + path);
}

void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    out << (i ? "," : "") << header[i];
  }
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << (i ? "," : "") << row[i];
    }
    out << "\n";
  }
}

// ---- shared flag bundles --------------------------------------------------

struct InstanceFlags {
  std::string input_path;  // positional; "-"/empty = stdin
  double deadline = 0.0;   // 0 = sum of gaps
  std::size_t packets = 0; // 0 = number of lines
  double bits = 1.0;
  double noise_density = 1.0;
  double bandwidth = 1.0;
  std::string out_path;
  std::string format = "json";
};

void add_instance_flags(CLI::App* cmd, InstanceFlags& flags) {
  cmd->add_option("file", flags.input_path,
                  "arrival gap file, one decimal per line (default stdin)");
  cmd->add_option("--deadline", flags.deadline,
                  "common deadline in seconds (default: sum of the gaps)");
  cmd->add_option("--packets", flags.packets,
                  "expected packet count (default: number of input lines)");
  cmd->add_option("--bits", flags.bits, "bits per packet (default 1)");
  cmd->add_option("--noise-density", flags.noise_density,
                  "noise power density N0 in W/Hz (default 1)");
  cmd->add_option("--bandwidth", flags.bandwidth,
                  "channel bandwidth in Hz (default 1)");
  cmd->add_option("--out", flags.out_path, "output path (default stdout)");
  cmd->add_option("--format", flags.format, "csv or json (default json)")
      ->check(CLI::IsMember({"csv", "json"}));
}

struct ParsedInput {
  cdsched::ProblemInstance instance;
  std::vector<double> gaps;
};

ParsedInput build_input(const InstanceFlags& flags) {
  ParsedInput parsed;
  parsed.gaps = read_gaps(flags.input_path);
  parsed.instance.packet_count =
      flags.packets ? flags.packets : parsed.gaps.size();
  if (flags.deadline > 0.0) {
    parsed.instance.deadline = flags.deadline;
  } else {
    double sum = 0.0;
    for (double g : parsed.gaps) sum += g;
    parsed.instance.deadline = sum;
  }
  parsed.instance.link.bits_per_packet = flags.bits;
  parsed.instance.link.noise_density = flags.noise_density;
  parsed.instance.link.bandwidth = flags.bandwidth;
  return parsed;
}

// ---- subcommand bodies -----------------------------------------------------

json schedule_to_json(const cdsched::Schedule& schedule,
                      const cdsched::ArrivalSequence& arrivals,
                      const cdsched::ProblemInstance& instance,
                      const std::string& mode) {
  json packets = json::array();
  for (std::size_t i = 0; i < schedule.packet_count(); ++i) {
    packets.push_back({{"index", i},
                       {"arrival", arrivals.arrival_time(i)},
                       {"start", schedule.starts[i]},
                       {"finish", schedule.finishes[i]},
                       {"duration", schedule.durations[i]},
                       {"energy", schedule.per_packet_energy[i]},
                       {"power", schedule.per_packet_power[i]}});
  }
  return json{{"mode", mode},
              {"packet_count", instance.packet_count},
              {"deadline", instance.deadline},
              {"total_energy", cdsched::total_energy(schedule, instance.link)},
              {"idle_time", schedule.idle_time()},
              {"packets", std::move(packets)}};
}

std::vector<std::vector<std::string>> schedule_rows(
    const cdsched::Schedule& schedule, const cdsched::ArrivalSequence& arrivals) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < schedule.packet_count(); ++i) {
    rows.push_back({std::to_string(i), format_double(arrivals.arrival_time(i)),
                    format_double(schedule.starts[i]),
                    format_double(schedule.finishes[i]),
                    format_double(schedule.durations[i]),
                    format_double(schedule.per_packet_energy[i]),
                    format_double(schedule.per_packet_power[i])});
  }
  return rows;
}

int run_schedule_command(const InstanceFlags& flags, bool offline) {
  const ParsedInput input = build_input(flags);
  const cdsched::ArrivalSequence arrivals =
      cdsched::validate_arrivals(input.gaps, input.instance);
  const cdsched::Schedule schedule =
      offline ? cdsched::opt_schedule(arrivals, input.instance)
              : cdsched::on_schedule(arrivals, input.instance);
  with_output(flags.out_path, [&](std::ostream& out) {
    if (flags.format == "csv") {
      write_csv(out,
                {"index", "arrival", "start", "finish", "duration", "energy",
                 "power"},
                schedule_rows(schedule, arrivals));
    } else {
      out << schedule_to_json(schedule, arrivals, input.instance,
                              offline ? "opt" : "on")
                 .dump(2)
          << "\n";
    }
  });
  return 0;
}

int run_eh_command(const InstanceFlags& flags, const std::string& harvest_path) {
  const ParsedInput input = build_input(flags);
  const cdsched::ArrivalSequence arrivals =
      cdsched::validate_arrivals(input.gaps, input.instance);
  const cdsched::HarvestProfile harvest = read_harvest(harvest_path);
  const cdsched::EhRun run =
      cdsched::eh_on_schedule(arrivals, harvest, input.instance);

  if (flags.format == "csv") {
    std::vector<std::vector<std::string>> rows =
        schedule_rows(run.schedule, arrivals);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      rows[i].push_back(format_double(run.ledger.grid_per_packet[i]));
      rows[i].push_back(format_double(run.ledger.harvested_used_per_packet[i]));
      rows[i].push_back(format_double(run.ledger.battery_at_packet_start[i]));
    }
    with_output(flags.out_path, [&](std::ostream& out) {
      write_csv(out,
                {"index", "arrival", "start", "finish", "duration", "energy",
                 "power", "grid", "harvested_used", "battery_at_start"},
                rows);
    });
    return 0;
  }

  json result =
      schedule_to_json(run.schedule, arrivals, input.instance, "eh");
  json ledger = {{"total_grid", run.ledger.total_grid()},
                 {"total_harvested_used", run.ledger.total_harvested_used()},
                 {"wasted_overflow", run.ledger.wasted_overflow}};
  json packets = json::array();
  for (std::size_t i = 0; i < run.schedule.packet_count(); ++i) {
    packets.push_back(
        {{"index", i},
         {"grid", run.ledger.grid_per_packet[i]},
         {"harvested_used", run.ledger.harvested_used_per_packet[i]},
         {"battery_at_start", run.ledger.battery_at_packet_start[i]}});
  }
  ledger["per_packet"] = std::move(packets);
  json trajectory = json::array();
  for (const cdsched::BatteryPoint& p : run.ledger.battery_trajectory) {
    trajectory.push_back({p.time, p.level});
  }
  ledger["battery_trajectory"] = std::move(trajectory);
  result["ledger"] = std::move(ledger);
  if (cdsched::eh_nondegeneracy_check(arrivals, harvest, input.instance)) {
    result["grid_cr_upper_bound"] =
        cdsched::grid_cr_surrogate(arrivals, harvest, input.instance);
  } else {
    // Harvest alone covers the offline optimum; the ratio is meaningless.
    result["degenerate"] = true;
  }
  with_output(flags.out_path, [&](std::ostream& out) {
    out << result.dump(2) << "\n";
  });
  return 0;
}

int run_cr_command(const InstanceFlags& flags) {
  const ParsedInput input = build_input(flags);
  const cdsched::ArrivalSequence arrivals =
      cdsched::validate_arrivals(input.gaps, input.instance);
  const double online = cdsched::total_energy(
      cdsched::on_schedule(arrivals, input.instance), input.instance.link);
  const double offline = cdsched::total_energy(
      cdsched::opt_schedule(arrivals, input.instance), input.instance.link);
  const double ratio = cdsched::competitive_ratio(arrivals, input.instance);
  const double count = static_cast<double>(input.instance.packet_count);
  with_output(flags.out_path, [&](std::ostream& out) {
    if (flags.format == "csv") {
      write_csv(out,
                {"packet_count", "online_energy", "offline_energy",
                 "competitive_ratio", "bound_natural", "bound_base2"},
                {{std::to_string(input.instance.packet_count),
                  format_double(online), format_double(offline),
                  format_double(ratio), format_double(1.0 + std::log(count)),
                  format_double(1.0 + std::log2(count))}});
    } else {
      const json result = {{"packet_count", input.instance.packet_count},
                           {"deadline", input.instance.deadline},
                           {"online_energy", online},
                           {"offline_energy", offline},
                           {"competitive_ratio", ratio},
                           {"bound_natural", 1.0 + std::log(count)},
                           {"bound_base2", 1.0 + std::log2(count)}};
      out << result.dump(2) << "\n";
    }
  });
  return 0;
}

int run_sweep_command(const std::string& config_path, const std::string& out_path,
                      const std::string& format) {
  cdsched::ExperimentConfig config =
      cdsched::load_experiment_config_file(config_path);
  const std::vector<cdsched::CrReport> reports = cdsched::run_sweep(config);
  const cdsched::OutputFormat fmt = format == "csv"
                                        ? cdsched::OutputFormat::csv
                                        : cdsched::OutputFormat::json;
  std::string target = out_path.empty() ? config.output_path : out_path;
  if (target.empty()) {
    cdsched::emit_results(reports, fmt, std::cout);
    if (!std::cout) throw IoError("failed writing to stdout");
  } else {
    cdsched::emit_results_to_file(reports, fmt, target);
  }
  return 0;
}

int run_worst_case_command(std::size_t packets, const cdsched::SearchConfig& search,
                           double deadline, double bits, double noise,
                           double bandwidth, const std::string& out_path,
                           const std::string& format) {
  cdsched::ProblemInstance instance;
  instance.packet_count = packets;
  instance.deadline = deadline;
  instance.link.bits_per_packet = bits;
  instance.link.noise_density = noise;
  instance.link.bandwidth = bandwidth;
  const cdsched::SearchResult result =
      cdsched::worst_case_search(instance, search);
  with_output(out_path, [&](std::ostream& out) {
    if (format == "csv") {
      // One gap per line: feed the file straight back into `cr` or `opt`.
      for (double g : result.arrivals.gaps()) out << format_double(g) << "\n";
    } else {
      const json doc = {
          {"packet_count", packets},
          {"deadline", deadline},
          {"cr", result.cr},
          {"transformed_cr", result.transformed_cr},
          {"converged", result.converged},
          {"bound_natural", 1.0 + std::log(static_cast<double>(packets))},
          {"gaps", result.arrivals.gaps()},
          {"accepted_crs", result.accepted_crs}};
      out << doc.dump(2) << "\n";
    }
  });
  return 0;
}

int run_remark1_command(double bits, std::size_t grid, const std::string& out_path,
                        const std::string& format) {
  const double bound = cdsched::unknown_p_lower_bound(bits, grid);
  with_output(out_path, [&](std::ostream& out) {
    if (format == "csv") {
      write_csv(out, {"bits", "grid", "lower_bound"},
                {{format_double(bits), std::to_string(grid),
                  format_double(bound)}});
    } else {
      const json doc = {
          {"bits", bits}, {"grid", grid}, {"lower_bound", bound}};
      out << doc.dump(2) << "\n";
    }
  });
  return 0;
}

int run_check_command(double scale, std::uint64_t seed) {
  cdsched::SuiteCounts counts;
  if (seed != 0) counts.seed = seed;
  const cdsched::PropertyReport report =
      cdsched::run_property_suite(counts.scaled(scale));
  cdsched::print_report(report, std::cout);
  return report.all_passed() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"common-deadline transmission scheduling toolkit"};
  app.require_subcommand(1);

  InstanceFlags opt_flags, on_flags, eh_flags, cr_flags;
  std::string harvest_path;

  CLI::App* cmd_opt =
      app.add_subcommand("opt", "offline-optimal schedule for one sequence");
  add_instance_flags(cmd_opt, opt_flags);

  CLI::App* cmd_on =
      app.add_subcommand("on", "online schedule for one sequence");
  add_instance_flags(cmd_on, on_flags);

  CLI::App* cmd_eh = app.add_subcommand(
      "eh", "online schedule with battery-first energy accounting");
  add_instance_flags(cmd_eh, eh_flags);
  cmd_eh->add_option("--harvest", harvest_path, "harvest profile JSON file")
      ->required();

  CLI::App* cmd_cr =
      app.add_subcommand("cr", "competitive ratio of one sequence");
  add_instance_flags(cmd_cr, cr_flags);

  std::string sweep_config, sweep_out, sweep_format = "json";
  CLI::App* cmd_sweep =
      app.add_subcommand("sweep", "Monte-Carlo sweep from a JSON config");
  cmd_sweep->add_option("--config", sweep_config, "experiment config JSON file")
      ->required();
  cmd_sweep->add_option("--out", sweep_out,
                        "output path (overrides config output_path)");
  cmd_sweep->add_option("--format", sweep_format, "csv or json (default json)")
      ->check(CLI::IsMember({"csv", "json"}));

  std::size_t wc_packets = 2;
  cdsched::SearchConfig wc_search;
  double wc_deadline = 1.0, wc_bits = 1.0, wc_noise = 1.0, wc_bandwidth = 1.0;
  std::string wc_out, wc_format = "json";
  CLI::App* cmd_wc = app.add_subcommand(
      "worst-case", "hill-climb search for high-ratio arrival sequences");
  cmd_wc->add_option("--packets", wc_packets, "packet count")->required();
  cmd_wc->add_option("--restarts", wc_search.restarts, "search restarts");
  cmd_wc->add_option("--seed", wc_search.seed, "search seed");
  cmd_wc->add_option("--step", wc_search.step_size,
                     "initial step as a fraction of the deadline");
  cmd_wc->add_option("--fd-eps", wc_search.fd_epsilon,
                     "finite-difference epsilon fraction");
  cmd_wc->add_option("--max-iters", wc_search.max_iters, "iterations per restart");
  cmd_wc->add_option("--deadline", wc_deadline, "deadline (default 1)");
  cmd_wc->add_option("--bits", wc_bits, "bits per packet (default 1)");
  cmd_wc->add_option("--noise-density", wc_noise, "N0 (default 1)");
  cmd_wc->add_option("--bandwidth", wc_bandwidth, "bandwidth (default 1)");
  cmd_wc->add_option("--out", wc_out, "output path (default stdout)");
  cmd_wc->add_option("--format", wc_format,
                     "json, or csv for a reusable gap file")
      ->check(CLI::IsMember({"csv", "json"}));

  double r1_bits = 1.0;
  std::size_t r1_grid = 4096;
  std::string r1_out, r1_format = "json";
  CLI::App* cmd_r1 = app.add_subcommand(
      "remark1", "lower bound for schedulers blind to the packet count");
  cmd_r1->add_option("--bits", r1_bits, "bits per packet")->required();
  cmd_r1->add_option("--grid", r1_grid, "commitment grid points (default 4096)");
  cmd_r1->add_option("--out", r1_out, "output path (default stdout)");
  cmd_r1->add_option("--format", r1_format, "csv or json (default json)")
      ->check(CLI::IsMember({"csv", "json"}));

  double check_scale = 1.0;
  std::uint64_t check_seed = 0;
  CLI::App* cmd_check =
      app.add_subcommand("check", "run every invariant suite");
  cmd_check->add_option("--scale", check_scale,
                        "case-count multiplier (e.g. 0.1 for a quick pass)");
  cmd_check->add_option("--seed", check_seed,
                        "override the default fuzz seed (0 keeps it)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(cmd_opt)) return run_schedule_command(opt_flags, true);
    if (app.got_subcommand(cmd_on)) return run_schedule_command(on_flags, false);
    if (app.got_subcommand(cmd_eh)) return run_eh_command(eh_flags, harvest_path);
    if (app.got_subcommand(cmd_cr)) return run_cr_command(cr_flags);
    if (app.got_subcommand(cmd_sweep)) {
      return run_sweep_command(sweep_config, sweep_out, sweep_format);
    }
    if (app.got_subcommand(cmd_wc)) {
      return run_worst_case_command(wc_packets, wc_search, wc_deadline, wc_bits,
                                    wc_noise, wc_bandwidth, wc_out, wc_format);
    }
    if (app.got_subcommand(cmd_r1)) {
      return run_remark1_command(r1_bits, r1_grid, r1_out, r1_format);
    }
    if (app.got_subcommand(cmd_check)) {
      return run_check_command(check_scale, check_seed);
    }
  } catch (const IoError& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 3;
  } catch (const std::ios_base::failure& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 3;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 1;
  }
  return 0;
}
