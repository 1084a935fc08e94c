#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wcat/rational.hpp"

namespace wcat {

// Pseudo-state accepted by energy_rate: costed at the highest peripheral
// draw of any real state. Classic state-oblivious analyses use this.
inline constexpr const char* kAlwaysOn = "always_on";

struct DeviceState {
  std::string id;
  Rat current_ma;  // peripheral contribution only; the CPU baseline is separate

  bool operator==(const DeviceState& o) const {
    return id == o.id && current_ma == o.current_ma;
  }
};

struct DeviceTransition {
  std::string from;
  std::string op;
  std::string to;
  // Switching penalties are representable but zero in the shipped model.
  std::uint64_t penalty_cycles = 0;

  bool operator==(const DeviceTransition& o) const {
    return from == o.from && op == o.op && to == o.to && penalty_cycles == o.penalty_cycles;
  }
};

struct DeviceGraph {
  std::vector<DeviceState> states;
  std::vector<DeviceTransition> transitions;
  std::string initial;

  const DeviceState* find_state(const std::string& id) const;
  bool has_op(const std::string& op) const;

  bool operator==(const DeviceGraph& o) const {
    return states == o.states && transitions == o.transitions && initial == o.initial;
  }
};

struct PlatformModel {
  Rat clock_hz;
  Rat supply_volts;
  Rat cpu_current_ma;

  bool operator==(const PlatformModel& o) const {
    return clock_hz == o.clock_hz && supply_volts == o.supply_volts &&
           cpu_current_ma == o.cpu_current_ma;
  }
};

struct DeviceModel {
  DeviceGraph graph;
  PlatformModel platform;
};

// The Wi-Fi transceiver model: Sleep(0 mA) / Standby(87 mA) /
// Transmitting(285 mA), ops wifi_power_up / wifi_power_down / tx_start /
// tx_done, initial Sleep; 160 MHz, 3.3 V, 28 mA CPU baseline.
DeviceModel default_esp32c3_model();

// Applies one op. Returns the successor state; ops with no arrow from
// `state` are inert (state returned unchanged, *inert set when non-null).
// Throws std::runtime_error on an unknown state id.
std::string step(const DeviceGraph& graph, const std::string& state, const std::string& op,
                 bool* inert = nullptr);

// Instantaneous power in watts while the CPU runs in `state`:
// supply_volts * (cpu_current + peripheral current). `always_on` uses the
// maximum peripheral draw. Throws std::runtime_error on unknown states.
Rat energy_rate(const DeviceGraph& graph, const PlatformModel& platform,
                const std::string& state);

// Joules consumed by one CPU cycle in `state` (= energy_rate / clock_hz).
Rat energy_per_cycle(const DeviceGraph& graph, const PlatformModel& platform,
                     const std::string& state);

// Seconds per cycle.
Rat cycle_seconds(const PlatformModel& platform);

// Text form, mirroring the WCIR style:
//   state <id> current_ma=<decimal>
//   transition <from> <op> <to>
//   initial <id>
//   platform clock_hz=<decimal> volts=<decimal> cpu_ma=<decimal>
// '#' starts a comment; ';' separates directives on one line.
// Throws ParseError on syntax and std::runtime_error on semantic problems
// (duplicate ids, nondeterministic (from,op), dangling references, missing
// initial/platform, negative draw, non-positive platform constants).
DeviceModel parse_device_model(const std::string& text);
DeviceModel load_device_model_file(const std::string& path);
std::string serialize_device_model(const DeviceModel& model);

}  // namespace wcat
