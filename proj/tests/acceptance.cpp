// Release gate: one line per shipped claim. Each criterion prints
// [PASS]/[FAIL], a one-line summary, and its runtime; the binary exits
// non-zero if any line fails. Checks are exact (rational arithmetic all
// the way through) except where a bracket is the documented contract.

#include <chrono>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "wcat/device.hpp"
#include "wcat/energy_trace.hpp"
#include "wcat/intermittent.hpp"
#include "wcat/ipet.hpp"
#include "wcat/peripheral.hpp"
#include "wcat/report.hpp"
#include "wcat/state_analysis.hpp"
#include "wcat/twins.hpp"

#include "support/random_programs.hpp"
#include "support/random_scripts.hpp"

using namespace wcat;

namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

struct Expected {
  const char* name;
  std::uint64_t cycles;
  const char* us;
  const char* aon_uj;
};

const std::vector<Expected>& published_rows() {
  static const std::vector<Expected> rows = {
      {"wifi_hw_deinit", 48, "0.3", "0.3099"},
      {"wifi_setup_interrupt", 178, "1.11", "1.149"},
      {"wifi_setup_rx", 1881, "11.8", "12.14"},
      {"wifi_hw_init", 49, "0.306", "0.3163"},
      {"wifi_transmit_packet", 335, "2.09", "2.163"},
      {"wifi_wait_for_tx", 52184, "326", "336.9"},
      {"wifi_process_tx_done", 157, "0.981", "1.014"},
      {"wifi_handle_rx", 12989, "81.2", "83.85"},
      {"wifi_process_timeout", 138, "0.862", "0.8909"},
      {"wifi_get_bssid", 94, "0.588", "0.6068"},
      {"wifi_mac_handle_rx", 68715, "429", "443.6"},
      {"wifi_interrupt_handler", 943, "5.89", "6.088"},
  };
  return rows;
}

std::string render_us(const Rat& seconds) { return format_sig(Rat(seconds * rat(1000000)), 3); }
std::string render_uj(const Rat& joules) { return format_sig(Rat(joules * rat(1000000)), 4); }

// Solve one objective with certification; throws on anything non-optimal.
Rat certified(const WcirProgram& p, const DeviceModel& m, Objective obj) {
  StateMap states = analyze_states(p, m.graph, m.graph.initial);
  IlpProblem ilp = build_ilp(p, &states, m.graph, m.platform, obj);
  IlpSolution sol = solve(ilp);
  if (sol.status != IlpStatus::optimal) throw std::runtime_error("solver returned non-optimal");
  if (!check_certificate(ilp, sol)) throw std::runtime_error("certificate rejected");
  return sol.objective_value;
}

// --- criterion bodies -------------------------------------------------------

Outcome per_function_results() {
  DeviceModel model = default_esp32c3_model();
  int matched = 0;
  for (const Expected& row : published_rows()) {
    ReportRow got = analyze_program(twin_by_name(row.name), model);
    if (got.wcet_cycles != row.cycles) return {false, std::string(row.name) + ": wrong cycles"};
    if (render_us(got.wcet_seconds) != row.us)
      return {false, std::string(row.name) + ": us column mismatch"};
    if (render_uj(got.aon_joules) != row.aon_uj)
      return {false, std::string(row.name) + ": always-on uJ column mismatch"};
    ++matched;
  }
  return {true, std::to_string(matched) + "/12 rows exact, all rendered columns match"};
}

Outcome task_always_on() {
  ReportRow row = analyze_program(twin_by_name("tx_task"), default_esp32c3_model());
  if (row.wcet_cycles != 52615) return {false, "expected 52615 cycles"};
  if (render_us(row.wcet_seconds) != "329") return {false, "us column mismatch"};
  if (render_uj(row.aon_joules) != "339.7") return {false, "always-on uJ column mismatch"};
  return {true, "52615 cy -> 329 us -> 339.7 uJ"};
}

Outcome task_device_aware_bracket() {
  DeviceModel model = default_esp32c3_model();
  ReportRow row = analyze_program(twin_by_name("tx_task"), model);
  Rat floor = Rat(rat_from_u64(row.wcet_cycles) *
                  energy_per_cycle(model.graph, model.platform, "Sleep"));
  if (row.da_joules < floor) return {false, "below the CPU-only floor"};
  if (!(row.da_joules < row.aon_joules)) return {false, "not below the always-on bound"};
  if (row.da_joules < rat(30) / rat(1000000) || row.da_joules > rat(40) / rat(1000000))
    return {false, "outside the documented 30-40 uJ bracket: " + render_uj(row.da_joules)};
  return {true, render_uj(row.da_joules) + " uJ, inside [" + render_uj(floor) + ", " +
                    render_uj(row.aon_joules) + "] and 30-40"};
}

Outcome ilp_vs_path_enumeration() {
  DeviceModel m = default_esp32c3_model();
  std::mt19937 rng(0xacce9701u);
  const int kPrograms = 200;
  int solves = 0;
  for (int i = 0; i < kPrograms; ++i) {
    WcirProgram p = testsupport::random_acyclic_program(rng);
    StateMap states = analyze_states(p, m.graph, m.graph.initial);
    Rat aon_rate = energy_per_cycle(m.graph, m.platform, kAlwaysOn);
    auto block_cycles = [&](const std::string& id) -> Rat {
      return rat_from_u64(p.find_block(id)->cycles);
    };
    const std::pair<Objective, std::function<Rat(const std::string&)>> objectives[] = {
        {Objective::wcet_cycles, [&](const std::string& id) -> Rat { return block_cycles(id); }},
        {Objective::wcec_always_on,
         [&](const std::string& id) -> Rat { return Rat(block_cycles(id) * aon_rate); }},
        {Objective::wcec_device_aware, [&](const std::string& id) -> Rat {
           return Rat(block_cycles(id) *
                      energy_per_cycle(m.graph, m.platform, states.at(id).cost_state));
         }}};
    for (const auto& [obj, cost] : objectives) {
      Rat brute = testsupport::max_path_cost(p, cost);
      Rat ilp = certified(p, m, obj);
      ++solves;
      if (ilp != brute) {
        std::ostringstream msg;
        msg << "mismatch on program " << i << " objective " << objective_name(obj);
        return {false, msg.str()};
      }
    }
  }
  return {true, std::to_string(kPrograms) + " programs x 3 objectives, " +
                    std::to_string(solves) + " solves, 0 mismatches"};
}

Outcome loop_bound_exactness() {
  DeviceModel m = default_esp32c3_model();
  const std::uint64_t iterations[] = {1, 10, 52160};
  const std::uint64_t shapes[][3] = {{0, 1, 0}, {7, 13, 5}, {100, 52, 9}};
  for (std::uint64_t n : iterations) {
    for (const auto& s : shapes) {
      WcirProgram p = testsupport::single_loop_program(s[0], s[1], s[2], n);
      Rat got = certified(p, m, Objective::wcet_cycles);
      Rat want = rat_from_u64(s[0] + n * s[1] + s[2]);
      if (got != want) {
        std::ostringstream msg;
        msg << "pre=" << s[0] << " body=" << s[1] << " post=" << s[2] << " n=" << n
            << ": WCET != closed form";
        return {false, msg.str()};
      }
    }
  }
  // The 52160-iteration polling loop is the protocol ACK annotation:
  // 52160 cy at 160 MHz is exactly 326 us.
  WcirProgram ack = testsupport::single_loop_program(0, 1, 0, 52160);
  Rat seconds = Rat(certified(ack, m, Objective::wcet_cycles) * cycle_seconds(m.platform));
  if (seconds != rat(326) / rat(1000000)) return {false, "52160 cy is not 326 us at 160 MHz"};
  return {true, "pre + n*body + post exact for n in {1, 10, 52160}; 52160 cy = 326 us"};
}

Outcome simulation_dominance() {
  DeviceModel m = default_esp32c3_model();
  std::mt19937 rng(0xd0a11a7eu);
  const int kScripts = 100;
  int runs = 0;
  for (int i = 0; i < kScripts; ++i) {
    ChannelScript script = parse_channel_script(testsupport::random_channel_script(rng));
    for (const Scenario& scenario : scenarios()) {
      WcirProgram twin = scenario.twin();
      Rat wcet = certified(twin, m, Objective::wcet_cycles);
      Rat wcec = certified(twin, m, Objective::wcec_device_aware);
      EnergyTrace trace = scenario.run(script);
      ++runs;
      if (rat_from_u64(trace.total_cycles) > wcet)
        return {false, scenario.name + ": simulated cycles exceed the WCET"};
      if (trace.total_energy > wcec)
        return {false, scenario.name + ": simulated energy exceeds the device-aware WCEC"};
    }
  }
  return {true, std::to_string(kScripts) + " random scripts x " +
                    std::to_string(scenarios().size()) + " scenarios, " + std::to_string(runs) +
                    " runs, 0 violations"};
}

Outcome solver_certification() {
  DeviceModel m = default_esp32c3_model();
  std::vector<WcirProgram> programs;
  for (const TwinEntry& e : driver_twins()) programs.push_back(e.build());
  programs.push_back(twin_tx_task());

  int certified_count = 0, rejected = 0;
  for (const WcirProgram& p : programs) {
    StateMap states = analyze_states(p, m.graph, m.graph.initial);
    for (Objective obj :
         {Objective::wcet_cycles, Objective::wcec_always_on, Objective::wcec_device_aware}) {
      IlpProblem ilp = build_ilp(p, &states, m.graph, m.platform, obj);
      IlpSolution sol = solve(ilp);
      if (sol.status != IlpStatus::optimal || !check_certificate(ilp, sol))
        return {false, p.name + ": genuine solution rejected"};
      ++certified_count;

      IlpSolution wrong_objective = sol;
      wrong_objective.objective_value = Rat(sol.objective_value + rat(1));
      if (check_certificate(ilp, wrong_objective))
        return {false, p.name + ": perturbed objective accepted"};
      ++rejected;

      IlpSolution wrong_flow = sol;
      std::size_t entry_var = ilp.var_index("f_" + p.entry);
      wrong_flow.values[entry_var] = Rat(wrong_flow.values[entry_var] + rat(1));
      if (check_certificate(ilp, wrong_flow))
        return {false, p.name + ": perturbed entry flow accepted"};
      ++rejected;
    }
  }
  return {true, std::to_string(certified_count) + " fixture solutions certified, " +
                    std::to_string(rejected) + " perturbations rejected"};
}

Outcome intermittent_safety() {
  ChannelScript worst;  // protocol-bound ACK latency, nothing received
  std::vector<Transaction> txns = {make_transaction(*find_scenario("tx_task"), worst),
                                   make_transaction(*find_scenario("bring_up"), worst)};
  std::mt19937 rng(0x5afe0197u);
  const int kTraces = 100;
  const std::uint64_t horizon = 300000000;  // 0.3 s
  std::uint64_t completions = 0;
  for (int i = 0; i < kTraces; ++i) {
    HarvestTrace harvest;
    int points = std::uniform_int_distribution<int>(1, 6)(rng);
    std::uint64_t t = 0;
    for (int k = 0; k < points; ++k) {
      HarvestPoint pt;
      pt.time_ns = t;
      pt.power_watts = rat(std::uniform_int_distribution<long>(0, 5000)(rng), 1000000);
      harvest.points.push_back(pt);
      t += std::uniform_int_distribution<std::uint64_t>(1, horizon / 4)(rng);
    }
    LifecycleReport report =
        simulate_lifecycle(Capacitor::standard(), txns, harvest, horizon);
    if (report.brown_outs != 0)
      return {false, "brown-out under random harvest trace " + std::to_string(i)};
    completions += report.completions;
  }

  // Sustained harvest at 1 mW: every charge-discharge period completes its
  // transaction — dispatch and completion counts agree and are nonzero.
  HarvestTrace steady;
  steady.points.push_back({0, rat(1, 1000)});
  LifecycleReport report = simulate_lifecycle(Capacitor::standard(), txns, steady, 500000000);
  std::uint64_t dispatches = 0;
  for (const LifecycleEvent& e : report.events)
    if (e.kind == LifecycleEvent::Kind::dispatch) ++dispatches;
  if (report.brown_outs != 0) return {false, "brown-out under sustained 1 mW"};
  if (report.completions < 1) return {false, "no completion under sustained 1 mW"};
  if (dispatches != report.completions)
    return {false, "a dispatched transaction did not complete"};
  return {true, std::to_string(kTraces) + " random traces, 0 brown-outs, " +
                    std::to_string(completions) + " completions; sustained 1 mW: " +
                    std::to_string(report.completions) + "/" + std::to_string(dispatches) +
                    " dispatches completed"};
}

Outcome register_map_conformance() {
  DeviceModel model = default_esp32c3_model();
  SimRam ram;
  Peripheral periph(model.graph, parse_channel_script(""), &ram);

  // A valid armed descriptor so the trigger register's write sticks.
  std::uint32_t desc = kRamBase + 0x100;
  std::uint32_t buf = kRamBase + 0x200;
  for (int i = 0; i < 60; ++i) ram.write8(buf + i, static_cast<std::uint8_t>(i));
  DmaDescriptor d;
  d.addr = desc;
  d.owner_hw = true;
  d.eof = true;
  d.filled = 60;
  d.capacity = 60;
  d.buffer = buf;
  d.next = 0;
  write_descriptor(ram, d);

  const std::pair<std::uint32_t, std::uint32_t> rw[] = {
      {kRegMacAddr, 0xa4cf1201u}, {kRegRxCtrl, kRxEnableBit | 5u},
      {kRegRxDmaBase, 0u},        {kRegIrqClear, 0x1edu},
      {kRegPower, kPowerBit},     {kRegTxSlotClear, 7u},
      {kRegTxTrigger, desc},      {kRegIrqSource, kIrqSourceWifi},
      {kRegIrqEnable, kIrqEnableBit}};
  int round_trips = 0;
  for (const auto& [addr, value] : rw) {
    periph.mmio_write(addr, value);
    if (periph.mmio_read(addr) != value) {
      char msg[64];
      std::snprintf(msg, sizeof msg, "R/W register 0x%08x does not round-trip", addr);
      return {false, msg};
    }
    ++round_trips;
  }

  bool reason_faults = false;
  try {
    periph.mmio_write(kRegIrqReason, 0);
  } catch (const AccessFault&) {
    reason_faults = true;
  }
  if (!reason_faults) return {false, "write to the read-only interrupt-reason register allowed"};
  (void)periph.mmio_read(kRegIrqReason);  // reads must stay legal

  // Off-map inside the window: reads zero, writes only warn. Outside: faults.
  if (periph.mmio_read(0x60033004) != 0) return {false, "unmapped window register reads nonzero"};
  for (std::uint32_t addr : {0x60032ffcu, 0x60036000u, 0x600c2108u}) {
    bool faulted = false;
    try {
      (void)periph.mmio_read(addr);
    } catch (const AccessFault&) {
      faulted = true;
    }
    if (!faulted) {
      char msg[64];
      std::snprintf(msg, sizeof msg, "access outside the map at 0x%08x did not fault", addr);
      return {false, msg};
    }
  }
  return {true, std::to_string(round_trips) +
                    " R/W registers round-trip; read-only and unmapped accesses enforced"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::optional<double> limit_s;
    std::function<Outcome()> body;
  };
  const std::vector<Criterion> criteria = {
      {"per-function results reproduced", 5.0, per_function_results},
      {"task always-on results reproduced", 1.0, task_always_on},
      {"task device-aware bracket", std::nullopt, task_device_aware_bracket},
      {"ILP equals path enumeration", 60.0, ilp_vs_path_enumeration},
      {"loop bounds exact", std::nullopt, loop_bound_exactness},
      {"simulation never exceeds analysis", 120.0, simulation_dominance},
      {"solution certification", std::nullopt, solver_certification},
      {"intermittent lifecycle safety", std::nullopt, intermittent_safety},
      {"register map conformance", std::nullopt, register_map_conformance},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const Criterion& c = criteria[i];
    auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.body();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_time = !c.limit_s || dt < *c.limit_s;
    bool pass = out.ok && in_time;
    if (!pass) ++failures;
    std::printf("[%s] %zu. %s — %s (%.2f s", pass ? "PASS" : "FAIL", i + 1, c.name,
                out.detail.c_str(), dt);
    if (c.limit_s) std::printf(", limit %.0f s", *c.limit_s);
    std::printf(")%s\n", out.ok && !in_time ? " [over time limit]" : "");
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
