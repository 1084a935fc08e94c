#pragma once

#include <string>

#include "wcat/device.hpp"
#include "wcat/ilp.hpp"
#include "wcat/program.hpp"
#include "wcat/state_analysis.hpp"

namespace wcat {

enum class Objective { wcet_cycles, wcec_always_on, wcec_device_aware };

const char* objective_name(Objective o);

// Implicit path enumeration: one frequency variable per block (f_<id>) and
// per edge, plus one virtual sink edge per exit (esink_<id>). Constraints:
//   flow_in_<b>:  f_b - sum(in edges)  = [b == entry ? 1 : 0]   (virtual source)
//   flow_out_<b>: f_b - sum(out edges) - [esink_b if exit] = 0
//   sink:         sum(esink_*) = 1
//   loop_<h>:     sum(back edges of h) <= bound * sum(entry edges of h)
// Loop-entry edges are edges into the header from outside the loop body; the
// virtual source counts as one such edge when the header is the program
// entry. Objective coefficients per block:
//   wcet_cycles       cycles(b)
//   wcec_always_on    cycles(b) / clock_hz * energy_rate(always_on)   [joules]
//   wcec_device_aware cycles(b) / clock_hz * energy_rate(cost_state(b))
// `statemap` may be null except for wcec_device_aware (std::invalid_argument).
// Requires a validated program (every back edge bounded, reducible).
IlpProblem build_ilp(const WcirProgram& program, const StateMap* statemap,
                     const DeviceGraph& graph, const PlatformModel& platform,
                     Objective objective);

// Renders the problem in the textual LP format (Maximize / Subject To /
// Bounds / Generals / End). Byte-reproducible for identical input; all
// coefficients are exact decimals.
std::string export_lp(const IlpProblem& problem);

}  // namespace wcat
