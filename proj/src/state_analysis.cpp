#include "wcat/state_analysis.hpp"

#include <deque>

namespace wcat {

const BlockStates& StateMap::at(const std::string& block_id) const {
  auto it = blocks.find(block_id);
  if (it == blocks.end()) throw std::runtime_error("no state info for block '" + block_id + "'");
  return it->second;
}

namespace {

// Higher peripheral draw wins; equal draws fall back to id order so reruns
// agree byte-for-byte.
std::string max_power_state(const DeviceGraph& graph, const std::set<std::string>& states) {
  std::string best;
  const DeviceState* best_s = nullptr;
  for (const auto& id : states) {
    const DeviceState* s = graph.find_state(id);
    if (!best_s || s->current_ma > best_s->current_ma) {
      best = id;
      best_s = s;
    }
  }
  return best;
}

}  // namespace

StateMap analyze_states(const WcirProgram& program, const DeviceGraph& graph,
                        const std::string& initial) {
  if (!graph.find_state(initial))
    throw std::runtime_error("unknown device state '" + initial + "'");
  for (const auto& s : program.entry_states)
    if (!graph.find_state(s))
      throw std::runtime_error("entry_states references unknown device state '" + s + "'");

  CfgIndex idx(program);
  StateMap result;
  for (const auto& b : program.blocks) result.blocks[b.id];

  result.blocks[program.entry].entry.insert(initial);
  for (const auto& s : program.entry_states) result.blocks[program.entry].entry.insert(s);

  // Worklist fixpoint; sets only grow, so termination is immediate from the
  // finite lattice.
  std::deque<std::string> work{program.entry};
  std::set<std::string> queued{program.entry};
  while (!work.empty()) {
    std::string id = work.front();
    work.pop_front();
    queued.erase(id);
    BlockStates& info = result.blocks[id];
    const BasicBlock* block = program.find_block(id);

    std::set<std::string> occupied = info.entry;
    std::set<std::string> frontier = info.entry;
    for (const auto& op : block->device_ops) {
      std::set<std::string> next;
      for (const auto& s : frontier) next.insert(step(graph, s, op));
      occupied.insert(next.begin(), next.end());
      frontier = std::move(next);
    }
    info.occupied = std::move(occupied);
    info.exit = frontier;
    info.cost_state = max_power_state(graph, info.occupied);

    for (const auto& succ : idx.succs[id]) {
      BlockStates& si = result.blocks[succ];
      std::size_t before = si.entry.size();
      si.entry.insert(info.exit.begin(), info.exit.end());
      if (si.entry.size() != before && queued.insert(succ).second) work.push_back(succ);
    }
  }

  // Unreachable blocks (rejected by validate, but be graceful): cost at the
  // initial state so the map is total.
  for (auto& [id, info] : result.blocks)
    if (info.cost_state.empty()) info.cost_state = initial;
  return result;
}

}  // namespace wcat
