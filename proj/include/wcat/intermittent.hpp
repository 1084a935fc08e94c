#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wcat/energy_trace.hpp"
#include "wcat/rational.hpp"

namespace wcat {

// Energy buffer between the harvester and the load. Voltages enter the
// arithmetic only as squares, so everything stays rational; an approximate
// voltage appears in rendered reports only.
struct Capacitor {
  Rat capacitance;  // farad
  Rat v_now;        // volt
  Rat v_min;        // brown-out threshold, volt
  Rat v_max;        // volt

  // 100 uF charged to 3.3 V with a 2.8 V floor: 152.5 uJ usable.
  static Capacitor standard();
};

// Usable energy above the brown-out floor: 1/2 C (v_now^2 - v_min^2).
// Throws std::invalid_argument when the invariant v_min <= v_now <= v_max
// (all positive) is broken.
Rat available_energy(const Capacitor& cap);

// Usable energy at full charge: 1/2 C (v_max^2 - v_min^2).
Rat capacity_energy(const Capacitor& cap);

// An atomic unit of work: admitted only when the analyzed bound fits the
// stored energy, drained during a run by its simulated trace.
struct Transaction {
  std::string scenario;  // bundled scenario name
  Rat wcec;              // analyzed device-aware bound, joules; must be > 0
  Rat wcet_seconds;      // analyzed WCET as wall-clock time
  EnergyTrace trace;     // simulated profile drained while running
};

// Analyzes the scenario's twin (certified solve) and simulates its run
// under `script` to assemble a dispatchable transaction. Throws
// std::runtime_error if the solve fails certification.
Transaction make_transaction(const Scenario& scenario, const ChannelScript& script);

enum class Decision { run, wait };

// Stored-energy-only admission: RUN iff txn.wcec <= available_energy(cap).
Decision dispatch(const Capacitor& cap, const Transaction& txn);

// Piecewise-constant harvested input power. Zero before the first point;
// each point holds from its time until the next.
struct HarvestPoint {
  std::uint64_t time_ns = 0;
  Rat power_watts;
};
struct HarvestTrace {
  std::vector<HarvestPoint> points;
};

// Text format, one step per line: `harvest <time_ns> <microwatts>`.
// '#' comments; times strictly increasing; powers >= 0. Violations throw
// std::runtime_error naming the offending line.
HarvestTrace parse_harvest_trace(const std::string& text);
HarvestTrace load_harvest_trace_file(const std::string& path);
std::string serialize_harvest_trace(const HarvestTrace& trace);

struct LifecycleEvent {
  enum class Kind { dispatch, complete, wait, brown_out };
  Kind kind = Kind::wait;
  std::uint64_t time_ns = 0;
  std::string txn;
  Rat stored;  // usable energy at the event, joules
};

struct LifecycleReport {
  std::uint64_t completions = 0;
  std::uint64_t waits = 0;
  std::uint64_t brown_outs = 0;
  std::vector<LifecycleEvent> events;
  Rat final_stored;  // joules
  std::uint64_t end_ns = 0;

  std::string render() const;  // line-oriented text summary
};

// Deterministic discrete-event lifecycle: charges the capacitor from the
// harvest trace, walks the transaction list as a circular queue, admits
// each transaction only when its analyzed WCEC fits the stored energy, and
// drains the simulated trace segment by segment while it runs. Harvest
// arriving during a run is discarded (strictly conservative). A transaction
// whose WCEC exceeds the capacitor's full capacity can never be admitted;
// the simulation then waits out the horizon.
LifecycleReport simulate_lifecycle(const Capacitor& cap, const std::vector<Transaction>& txns,
                                   const HarvestTrace& harvest, std::uint64_t horizon_ns);

}  // namespace wcat
