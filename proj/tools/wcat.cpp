// wcat: worst-case execution time and energy analysis for the modeled
// Wi-Fi module, plus simulation against the bundled peripheral.
//
// Subcommands: analyze, simulate, export-lp, lifecycle.
// Exit codes: 0 success, 1 diagnostics, 2 usage.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "wcat/device.hpp"
#include "wcat/energy_trace.hpp"
#include "wcat/intermittent.hpp"
#include "wcat/ipet.hpp"
#include "wcat/report.hpp"
#include "wcat/state_analysis.hpp"

namespace {

using namespace wcat;

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct ModelFlags {
  std::string device_graph_path;
  std::string platform_overrides;

  DeviceModel load() const {
    DeviceModel model = device_graph_path.empty() ? default_esp32c3_model()
                                                  : load_device_model_file(device_graph_path);
    for (const std::string& pair : split(platform_overrides, ',')) {
      std::string::size_type eq = pair.find('=');
      if (eq == std::string::npos)
        throw std::runtime_error("platform override '" + pair + "' is not key=value");
      std::string key = pair.substr(0, eq);
      Rat value = parse_decimal(pair.substr(eq + 1));
      if (value <= 0) throw std::runtime_error("platform " + key + " must be positive");
      if (key == "clock_hz")
        model.platform.clock_hz = value;
      else if (key == "volts")
        model.platform.supply_volts = value;
      else if (key == "cpu_ma")
        model.platform.cpu_current_ma = value;
      else
        throw std::runtime_error("unknown platform key '" + key +
                                 "' (clock_hz, volts, cpu_ma)");
    }
    return model;
  }
};

void apply_entry_states(WcirProgram& program, const std::string& csv) {
  if (csv.empty()) return;
  program.entry_states.clear();
  for (const std::string& s : split(csv, ',')) program.entry_states.insert(s);
}

void write_output(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  out << content;
}

Objective objective_from_name(const std::string& name) {
  if (name == "wcet") return Objective::wcet_cycles;
  if (name == "wcec-always-on") return Objective::wcec_always_on;
  if (name == "wcec-device-aware") return Objective::wcec_device_aware;
  throw CLI::ValidationError("--objective", "unknown objective '" + name + "'");
}

// --- analyze ---------------------------------------------------------------

int run_analyze(const std::vector<std::string>& paths, const std::string& objective,
                const ModelFlags& flags, const std::string& entry_states, bool machine) {
  DeviceModel model = flags.load();
  ReportBundle bundle;
  for (const std::string& path : paths) {
    WcirProgram program = load_program_file(path);
    apply_entry_states(program, entry_states);
    bundle.rows.push_back(analyze_program(program, model));
  }
  if (objective == "all") {
    std::cout << (machine ? bundle.render_machine() : bundle.render_table());
    return 0;
  }
  Objective obj = objective_from_name(objective);
  for (const ReportRow& row : bundle.rows) {
    std::string value;
    switch (obj) {
      case Objective::wcet_cycles:
        value = std::to_string(row.wcet_cycles);
        break;
      case Objective::wcec_always_on:
        value = format_sig(row.aon_joules * rat(1000000), 4);
        break;
      case Objective::wcec_device_aware:
        value = format_sig(row.da_joules * rat(1000000), 4);
        break;
    }
    std::cout << row.name << " " << value << "\n";
  }
  return 0;
}

// --- simulate ---------------------------------------------------------------

int run_simulate(const std::string& scenario_name, const std::string& script_path,
                 const std::string& check_bound_uj, const std::string& out_path) {
  const Scenario* scenario = find_scenario(scenario_name);
  if (scenario == nullptr) {
    std::string names;
    for (const Scenario& s : scenarios()) names += " " + s.name;
    throw std::runtime_error("unknown scenario '" + scenario_name + "'; bundled:" + names);
  }
  ChannelScript script = load_channel_script_file(script_path);
  EnergyTrace trace = scenario->run(script);
  write_output(out_path, export_trace(trace));

  if (check_bound_uj.empty()) return 0;
  Rat bound = parse_decimal(check_bound_uj) / rat(1000000);
  BoundVerdict verdict = check_bound(trace, bound);
  Rat scale = rat(1000000);
  if (verdict.pass) {
    std::cout << "bound pass slack_uJ=" << format_sig(verdict.slack * scale, 6) << "\n";
    return 0;
  }
  std::cout << "bound FAIL excess_uJ=" << format_sig(-verdict.slack * scale, 6) << "\n";
  return 1;
}

// --- export-lp ---------------------------------------------------------------

int run_export_lp(const std::string& path, const std::string& objective, const ModelFlags& flags,
                  const std::string& entry_states, const std::string& out_path) {
  DeviceModel model = flags.load();
  WcirProgram program = load_program_file(path);
  apply_entry_states(program, entry_states);
  StateMap states = analyze_states(program, model.graph, model.graph.initial);
  IlpProblem ilp =
      build_ilp(program, &states, model.graph, model.platform, objective_from_name(objective));
  write_output(out_path, export_lp(ilp));
  return 0;
}

// --- lifecycle ---------------------------------------------------------------

struct LifecycleConfig {
  Capacitor cap = Capacitor::standard();
  std::uint64_t horizon_ns = 1000000000;
  std::vector<std::string> txns;
  std::string script_path;
  std::string harvest_text;
};

LifecycleConfig parse_lifecycle_config(const std::string& text) {
  LifecycleConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw std::runtime_error("lifecycle config line " + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    std::string::size_type hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream tok(line);
    std::string word;
    if (!(tok >> word)) continue;
    if (word == "capacitor") {
      std::string c, v_now, v_min, v_max;
      if (!(tok >> c >> v_now >> v_min >> v_max))
        fail("expected: capacitor <farad> <v_now> <v_min> <v_max>");
      cfg.cap.capacitance = parse_decimal(c);
      cfg.cap.v_now = parse_decimal(v_now);
      cfg.cap.v_min = parse_decimal(v_min);
      cfg.cap.v_max = parse_decimal(v_max);
    } else if (word == "horizon_ns") {
      if (!(tok >> cfg.horizon_ns)) fail("expected: horizon_ns <nanoseconds>");
    } else if (word == "txn") {
      std::string name;
      if (!(tok >> name)) fail("expected: txn <scenario>");
      cfg.txns.push_back(name);
    } else if (word == "script") {
      if (!(tok >> cfg.script_path)) fail("expected: script <path>");
    } else if (word == "harvest") {
      std::string rest;
      std::getline(tok, rest);
      cfg.harvest_text += "harvest" + rest + "\n";
    } else {
      fail("unknown directive '" + word + "'");
    }
    if (word != "harvest") {
      std::string extra;
      if (tok >> extra) fail("trailing token '" + extra + "'");
    }
  }
  return cfg;
}

int run_lifecycle(const std::string& config_path) {
  std::ifstream in(config_path);
  if (!in) throw std::runtime_error("cannot open lifecycle config: " + config_path);
  std::ostringstream buf;
  buf << in.rdbuf();
  LifecycleConfig cfg = parse_lifecycle_config(buf.str());

  ChannelScript script = cfg.script_path.empty() ? parse_channel_script("")
                                                 : load_channel_script_file(cfg.script_path);
  std::vector<Transaction> txns;
  for (const std::string& name : cfg.txns) {
    const Scenario* scenario = find_scenario(name);
    if (scenario == nullptr) throw std::runtime_error("unknown scenario '" + name + "'");
    txns.push_back(make_transaction(*scenario, script));
  }
  HarvestTrace harvest = parse_harvest_trace(cfg.harvest_text);
  LifecycleReport report = simulate_lifecycle(cfg.cap, txns, harvest, cfg.horizon_ns);
  std::cout << report.render();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"worst-case execution time and energy analysis toolkit"};
  app.require_subcommand(1);

  // analyze
  std::vector<std::string> paths;
  std::string objective = "all";
  ModelFlags flags;
  std::string entry_states;
  bool machine = false;
  CLI::App* analyze = app.add_subcommand("analyze", "analyze WCIR programs");
  analyze->add_option("paths", paths, "WCIR program files")->required()->expected(-1);
  analyze->add_option("--objective", objective,
                      "all, wcet, wcec-always-on or wcec-device-aware");
  analyze->add_option("--device-graph", flags.device_graph_path, "device model file");
  analyze->add_option("--platform", flags.platform_overrides,
                      "clock_hz=..,volts=..,cpu_ma=.. overrides");
  analyze->add_option("--entry-states", entry_states, "comma-separated entry state override");
  analyze->add_flag("--machine", machine, "machine-readable rows");

  // simulate
  std::string scenario_name, script_path, check_bound_uj, out_path;
  CLI::App* simulate = app.add_subcommand("simulate", "run a bundled scenario under a script");
  simulate->add_option("--scenario", scenario_name, "bundled scenario name")->required();
  simulate->add_option("--script", script_path, "channel script file")->required();
  simulate->add_option("--check-bound", check_bound_uj, "bound in microjoules to verify");
  simulate->add_option("--out", out_path, "write the trace here instead of stdout");

  // export-lp
  std::string lp_path, lp_objective = "wcet", lp_entry_states, lp_out;
  ModelFlags lp_flags;
  CLI::App* export_lp_cmd = app.add_subcommand("export-lp", "render the ILP in LP format");
  export_lp_cmd->add_option("path", lp_path, "WCIR program file")->required();
  export_lp_cmd->add_option("--objective", lp_objective,
                            "wcet, wcec-always-on or wcec-device-aware");
  export_lp_cmd->add_option("--device-graph", lp_flags.device_graph_path, "device model file");
  export_lp_cmd->add_option("--platform", lp_flags.platform_overrides,
                            "clock_hz=..,volts=..,cpu_ma=.. overrides");
  export_lp_cmd->add_option("--entry-states", lp_entry_states,
                            "comma-separated entry state override");
  export_lp_cmd->add_option("--out", lp_out, "write the LP file here instead of stdout");

  // lifecycle
  std::string config_path;
  CLI::App* lifecycle = app.add_subcommand("lifecycle", "simulate an intermittent lifecycle");
  lifecycle->add_option("config", config_path, "lifecycle config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*analyze) return run_analyze(paths, objective, flags, entry_states, machine);
    if (*simulate) return run_simulate(scenario_name, script_path, check_bound_uj, out_path);
    if (*export_lp_cmd)
      return run_export_lp(lp_path, lp_objective, lp_flags, lp_entry_states, lp_out);
    if (*lifecycle) return run_lifecycle(config_path);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "wcat: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "wcat: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
