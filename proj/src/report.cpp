#include "wcat/report.hpp"

#include <algorithm>
#include <stdexcept>

#include "wcat/ipet.hpp"
#include "wcat/state_analysis.hpp"

namespace wcat {

namespace {

Rat certified_optimum(const WcirProgram& p, const StateMap& states, const DeviceModel& m,
                      Objective obj) {
  IlpProblem ilp = build_ilp(p, &states, m.graph, m.platform, obj);
  IlpSolution sol = solve(ilp);
  if (sol.status != IlpStatus::optimal)
    throw std::runtime_error("analysis of '" + p.name + "' (" + objective_name(obj) +
                             ") did not reach an optimum");
  if (!check_certificate(ilp, sol))
    throw std::runtime_error("certificate check failed for '" + p.name + "' (" +
                             objective_name(obj) + ")");
  return sol.objective_value;
}

std::string us_3(const Rat& seconds) { return format_sig(seconds * rat(1000000), 3); }
std::string uj_4(const Rat& joules) { return format_sig(joules * rat(1000000), 4); }

void pad_to(std::string& s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
}

}  // namespace

ReportRow analyze_program(const WcirProgram& program, const DeviceModel& model) {
  StateMap states = analyze_states(program, model.graph, model.graph.initial);

  ReportRow row;
  row.name = program.name;

  Rat cycles = certified_optimum(program, states, model, Objective::wcet_cycles);
  if (!is_integer(cycles) || cycles < 0)
    throw std::runtime_error("WCET of '" + program.name + "' is not a whole cycle count");
  row.wcet_cycles = static_cast<std::uint64_t>(cycles.get_num().get_ui());
  row.wcet_seconds = cycles * cycle_seconds(model.platform);

  row.aon_joules = certified_optimum(program, states, model, Objective::wcec_always_on);
  Rat recomputed = cycles * energy_per_cycle(model.graph, model.platform, kAlwaysOn);
  if (recomputed != row.aon_joules)
    throw std::runtime_error("always-on energy of '" + program.name +
                             "' disagrees with its cycle count");

  row.da_joules = certified_optimum(program, states, model, Objective::wcec_device_aware);
  return row;
}

std::string ReportBundle::render_table() const {
  static const char* kHeads[5] = {"name", "wcet_cycles", "wcet_us", "always_on_uJ",
                                  "device_aware_uJ"};
  std::vector<std::vector<std::string>> cells;
  cells.push_back({kHeads[0], kHeads[1], kHeads[2], kHeads[3], kHeads[4]});
  for (const ReportRow& r : rows) {
    cells.push_back({r.name, std::to_string(r.wcet_cycles), us_3(r.wcet_seconds),
                     uj_4(r.aon_joules), uj_4(r.da_joules)});
  }
  std::size_t width[5] = {0, 0, 0, 0, 0};
  for (const auto& line : cells)
    for (int c = 0; c < 5; ++c) width[c] = std::max(width[c], line[c].size());

  std::string out;
  for (const auto& line : cells) {
    std::string rendered;
    for (int c = 0; c < 5; ++c) {
      std::string cell = line[c];
      pad_to(cell, width[c]);
      rendered += cell;
      if (c != 4) rendered += "  ";
    }
    while (!rendered.empty() && rendered.back() == ' ') rendered.pop_back();
    out += rendered + "\n";
  }
  return out;
}

std::string ReportBundle::render_machine() const {
  std::string out;
  for (const ReportRow& r : rows) {
    out += "row " + r.name + " " + std::to_string(r.wcet_cycles) + " " +
           to_exact_decimal(r.wcet_seconds * rat(1000000000)) + " " +
           to_exact_decimal(r.aon_joules * rat(1000000000000)) + " " +
           to_exact_decimal(r.da_joules * rat(1000000000000)) + "\n";
  }
  return out;
}

}  // namespace wcat
