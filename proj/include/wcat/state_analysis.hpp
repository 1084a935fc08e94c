#pragma once

#include <map>
#include <set>
#include <string>

#include "wcat/device.hpp"
#include "wcat/program.hpp"

namespace wcat {

struct BlockStates {
  std::set<std::string> entry;     // possible device states when the block starts
  std::set<std::string> exit;      // after its device_ops have fired
  std::set<std::string> occupied;  // entry ∪ every intermediate state along the op prefix
  std::string cost_state;          // max-power member of `occupied`; costs the whole block
};

struct StateMap {
  std::map<std::string, BlockStates> blocks;

  const BlockStates& at(const std::string& block_id) const;
};

// Forward dataflow over the CFG: in(b) = ∪ out(preds), out(b) = step-fold of
// b.device_ops over each state in in(b); least fixed point (finite lattice).
// The program entry starts at {initial} ∪ program.entry_states. Each block
// is costed at the highest-power state it can occupy at any point while it
// executes — sound without block splitting. Ties break on state id so the
// result is deterministic. Throws std::runtime_error when `initial` or an
// override state is not in the graph.
StateMap analyze_states(const WcirProgram& program, const DeviceGraph& graph,
                        const std::string& initial);

}  // namespace wcat
