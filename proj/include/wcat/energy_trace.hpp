#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "wcat/device.hpp"
#include "wcat/peripheral.hpp"
#include "wcat/program.hpp"
#include "wcat/rational.hpp"

namespace wcat {

// One maximal run of wall-clock time the device spent in a single state.
// Timestamps are picoseconds on the simulator clock.
struct TraceSegment {
  std::uint64_t start_ps = 0;
  std::uint64_t end_ps = 0;
  std::string state;

  bool operator==(const TraceSegment& o) const = default;
};

// Time-ordered record of (time, device state) segments from a simulated
// run, integrated to joules with the analyzer's own energy constants so a
// dominance failure can never be a rounding artifact.
struct EnergyTrace {
  std::vector<TraceSegment> segments;  // contiguous, non-overlapping, nonempty each
  std::uint64_t total_cycles = 0;      // ceil(duration / cycle time)
  std::map<std::string, Rat> per_state_energy;  // joules, exact
  Rat total_energy;                             // joules, exact

  std::uint64_t duration_ps() const;
  bool empty() const { return segments.empty(); }
};

// Builds a finalized trace from raw segments: zero-length segments are
// dropped, adjacent same-state segments merged, contiguity enforced
// (std::invalid_argument on gaps, overlaps, or unknown states), and the
// energy fields integrated from the model.
EnergyTrace make_trace(std::vector<TraceSegment> segments, const DeviceModel& model);

// Concatenation: b must begin exactly where a ends (unless either side is
// empty). Energies add exactly.
EnergyTrace concat_traces(const EnergyTrace& a, const EnergyTrace& b, const DeviceModel& model);

// Verdict of a trace against an analyzed energy bound, both in joules.
// Passing means total <= bound; `slack` is bound - total (negative on a
// failure, i.e. the excess).
struct BoundVerdict {
  bool pass = false;
  Rat slack;
};
BoundVerdict check_bound(const EnergyTrace& trace, const Rat& bound_joules);

// Line-oriented text form:
//   segment <start_ns> <end_ns> <state>     (exact decimal nanoseconds)
//   cycles <total_cycles>
//   energy <state> <joules>                 (exact decimal, sorted by state)
//   total_energy <joules>
std::string export_trace(const EnergyTrace& trace);

// Records device-state changes from a peripheral between begin() and end().
// Claims the peripheral's listener slot for its lifetime.
class EnergyTracer {
 public:
  EnergyTracer(Peripheral& periph, const DeviceModel& model);
  ~EnergyTracer();
  EnergyTracer(const EnergyTracer&) = delete;
  EnergyTracer& operator=(const EnergyTracer&) = delete;

  void begin();
  EnergyTrace end();

 private:
  static void on_change(void* user, std::uint64_t time_ps, const std::string& state);

  Peripheral& periph_;
  const DeviceModel& model_;
  bool active_ = false;
  std::vector<TraceSegment> segments_;
  std::uint64_t seg_start_ps_ = 0;
  std::string seg_state_;
};

// A bundled driver-model entry point that can be simulated under a channel
// script. `run` performs any untraced setup, then executes the measured
// region under a tracer; `twin` builds the WCIR program whose analysis
// bounds that region (simulated cycles <= WCET, simulated energy <=
// device-aware WCEC, for every script the parser accepts).
struct Scenario {
  std::string name;
  std::string summary;
  WcirProgram (*twin)();
  EnergyTrace (*run)(const ChannelScript& script);
};

const std::vector<Scenario>& scenarios();
const Scenario* find_scenario(const std::string& name);  // null if unknown

}  // namespace wcat
