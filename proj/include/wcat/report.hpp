#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wcat/device.hpp"
#include "wcat/program.hpp"
#include "wcat/rational.hpp"

namespace wcat {

// One analyzed program: every column from a certified solve, times and
// energies exact until rendering.
struct ReportRow {
  std::string name;
  std::uint64_t wcet_cycles = 0;
  Rat wcet_seconds;
  Rat aon_joules;  // state-oblivious bound
  Rat da_joules;   // device-aware bound
};

struct ReportBundle {
  std::vector<ReportRow> rows;

  // Aligned table; microseconds to 3 significant figures, microjoules to 4,
  // half-even, as the result tables render them.
  std::string render_table() const;

  // Machine-readable rows: `row <name> <cycles> <ns> <aon_pJ> <da_pJ>`.
  // Fine-grained units keep the fields exact decimals (integral whenever
  // the platform constants allow).
  std::string render_machine() const;
};

// Full pipeline for one program: state analysis, one certified solve per
// objective, plus the cross-check that the always-on energy equals the
// WCET cycle count priced at the always-on rate. Throws std::runtime_error
// on solver failure, certification failure, or a failed cross-check.
ReportRow analyze_program(const WcirProgram& program, const DeviceModel& model);

}  // namespace wcat
