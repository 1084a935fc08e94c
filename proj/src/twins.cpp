#include "wcat/twins.hpp"

#include <stdexcept>

#include "wcat/driver_costs.hpp"

namespace wcat {
namespace {

using namespace costs;

// Linear chain of regions; a node with loop_bound > 0 becomes a while-shaped
// loop (zero-cost header, one body block, annotated back edge).
struct Node {
  std::string id;
  std::uint64_t cycles = 0;
  std::vector<std::string> ops = {};
  std::uint64_t loop_bound = 0;
  BoundOrigin origin = BoundOrigin::driver;
  std::uint64_t body_cycles = 0;
  std::vector<std::string> body_ops = {};
};

WcirProgram build(const std::string& name, const std::vector<Node>& nodes,
                  std::set<std::string> entry_states = {"Standby"}) {
  WcirProgram p;
  p.name = name;
  p.entry_states = std::move(entry_states);
  std::string prev;
  for (const Node& n : nodes) {
    p.blocks.push_back({n.id, n.cycles, n.ops, "", 0});
    if (!prev.empty()) p.edges.push_back({prev, n.id, EdgeKind::forward, 0});
    if (n.loop_bound > 0) {
      std::string body = n.id + "_body";
      p.blocks.push_back({body, n.body_cycles, n.body_ops, "", 0});
      p.edges.push_back({n.id, body, EdgeKind::forward, 0});
      p.edges.push_back({body, n.id, EdgeKind::forward, 0});
      p.annotations.push_back({n.id, n.loop_bound, n.origin, 0});
    }
    prev = n.id;
  }
  p.entry = nodes.front().id;
  p.exits = {nodes.back().id};
  classify_edges(p);
  return p;
}

}  // namespace

WcirProgram twin_hw_init() {
  // Pre-state: module asleep — the device graph's initial state already is,
  // so no entry-state override.
  return build("wifi_hw_init",
               {{"enter", hw_init::enter},
                {"power", hw_init::power, {"wifi_power_up"}},
                {"leave", hw_init::leave}},
               {});
}

WcirProgram twin_hw_deinit() {
  return build("wifi_hw_deinit", {{"enter", hw_deinit::enter},
                                  {"power", hw_deinit::power, {"wifi_power_down"}},
                                  {"leave", hw_deinit::leave}});
}

WcirProgram twin_setup_interrupt() {
  return build("wifi_setup_interrupt",
               {{"clear_source", setup_interrupt::clear_source},
                {"clear_enable", setup_interrupt::clear_enable},
                {"register_handler", setup_interrupt::register_handler},
                {"enable", setup_interrupt::enable}});
}

WcirProgram twin_setup_rx() {
  Node descriptors{"build", 0};
  descriptors.loop_bound = kRxPoolSize;
  descriptors.origin = BoundOrigin::driver;
  descriptors.body_cycles = setup_rx::per_descriptor;
  Node confirm{"confirm", 0};
  confirm.loop_bound = kDmaConfirmCycles;
  confirm.origin = BoundOrigin::hardware;
  confirm.body_cycles = setup_rx::confirm_iter;
  return build("wifi_setup_rx", {{"enter", setup_rx::enter},
                                 descriptors,
                                 {"write_base", setup_rx::write_base},
                                 {"enable", setup_rx::enable},
                                 confirm,
                                 {"leave", setup_rx::leave}});
}

WcirProgram twin_transmit_packet() {
  return build("wifi_transmit_packet",
               {{"validate", transmit_packet::validate},
                {"header", transmit_packet::header},
                {"descriptor", transmit_packet::descriptor},
                {"trigger", transmit_packet::trigger, {"tx_start"}},
                {"leave", transmit_packet::leave}});
}

WcirProgram twin_wait_for_tx() {
  Node poll{"poll", 0};
  poll.loop_bound = kAckWaitCycles;
  poll.origin = BoundOrigin::protocol;
  poll.body_cycles = wait_for_tx::poll_iter;
  return build("wifi_wait_for_tx",
               {{"enter", wait_for_tx::enter}, poll, {"leave", wait_for_tx::leave}},
               {"Transmitting"});
}

WcirProgram twin_process_tx_done() {
  return build("wifi_process_tx_done", {{"enter", process_tx_done::enter},
                                        {"clear_irq", process_tx_done::clear_irq},
                                        {"clear_slot", process_tx_done::clear_slot},
                                        {"leave", process_tx_done::leave}});
}

WcirProgram twin_handle_rx() {
  Node walk{"walk", 0};
  walk.loop_bound = kRxPoolSize;
  walk.origin = BoundOrigin::driver;
  walk.body_cycles = handle_rx::per_frame;
  return build("wifi_handle_rx",
               {{"enter", handle_rx::enter}, walk, {"leave", handle_rx::leave}});
}

WcirProgram twin_process_timeout() {
  return build("wifi_process_timeout", {{"enter", process_timeout::enter},
                                        {"clear_irq", process_timeout::clear_irq},
                                        {"clear_slot", process_timeout::clear_slot}});
}

WcirProgram twin_get_bssid() {
  Node copy{"copy", 0};
  copy.loop_bound = kMacBytes;
  copy.origin = BoundOrigin::driver;
  copy.body_cycles = get_bssid::per_byte;
  return build("wifi_get_bssid",
               {{"enter", get_bssid::enter}, copy, {"leave", get_bssid::leave}});
}

WcirProgram twin_mac_handle_rx() {
  Node copy{"copy", 0};
  copy.loop_bound = kMaxPayload;
  copy.origin = BoundOrigin::driver;
  copy.body_cycles = mac_handle_rx::per_byte;
  return build("wifi_mac_handle_rx",
               {{"enter", mac_handle_rx::enter}, copy, {"leave", mac_handle_rx::leave}});
}

WcirProgram twin_interrupt_handler() {
  return build("wifi_interrupt_handler", {{"enter", interrupt_handler::enter},
                                          {"read_reason", interrupt_handler::read_reason},
                                          {"enqueue", interrupt_handler::enqueue},
                                          {"ack", interrupt_handler::ack}});
}

WcirProgram twin_tx_task() {
  Node poll{"poll", 0};
  poll.loop_bound = tx_task::poll_bound;
  poll.origin = BoundOrigin::protocol;
  poll.body_cycles = tx_task::poll_iter;
  return build("tx_task", {{"enter", tx_task::enter},
                           {"tx", transmit_packet::total, {"tx_start"}},
                           {"drain", tx_task::drain},
                           {"gate", tx_task::gate, {"tx_done", "wifi_power_down"}},
                           poll,
                           {"wake", tx_task::wake, {"wifi_power_up"}},
                           {"done", process_tx_done::total},
                           {"leave", tx_task::leave}});
}

WcirProgram twin_tx_task_standby_wait() {
  // Same cycle structure as twin_tx_task, alternative wait-power policy:
  // the module idles in Standby instead of power-gating while the task
  // polls for the completion interrupt.
  Node poll{"poll", 0};
  poll.loop_bound = tx_task::poll_bound;
  poll.origin = BoundOrigin::protocol;
  poll.body_cycles = tx_task::poll_iter;
  return build("tx_task_standby_wait", {{"enter", tx_task::enter},
                                        {"tx", transmit_packet::total, {"tx_start"}},
                                        {"drain", tx_task::drain},
                                        {"gate", tx_task::gate, {"tx_done"}},
                                        poll,
                                        {"wake", tx_task::wake},
                                        {"done", process_tx_done::total},
                                        {"leave", tx_task::leave}});
}

const std::vector<TwinEntry>& driver_twins() {
  static const std::vector<TwinEntry> table = {
      {"wifi_hw_deinit", &twin_hw_deinit, hw_deinit::total},
      {"wifi_setup_interrupt", &twin_setup_interrupt, setup_interrupt::total},
      {"wifi_setup_rx", &twin_setup_rx, setup_rx::total},
      {"wifi_hw_init", &twin_hw_init, hw_init::total},
      {"wifi_transmit_packet", &twin_transmit_packet, transmit_packet::total},
      {"wifi_wait_for_tx", &twin_wait_for_tx, wait_for_tx::total},
      {"wifi_process_tx_done", &twin_process_tx_done, process_tx_done::total},
      {"wifi_handle_rx", &twin_handle_rx, handle_rx::total},
      {"wifi_process_timeout", &twin_process_timeout, process_timeout::total},
      {"wifi_get_bssid", &twin_get_bssid, get_bssid::total},
      {"wifi_mac_handle_rx", &twin_mac_handle_rx, mac_handle_rx::total},
      {"wifi_interrupt_handler", &twin_interrupt_handler, interrupt_handler::total},
  };
  return table;
}

WcirProgram twin_by_name(const std::string& name) {
  for (const TwinEntry& e : driver_twins()) {
    if (e.name == name) return e.build();
  }
  if (name == "tx_task") return twin_tx_task();
  if (name == "tx_task_standby_wait") return twin_tx_task_standby_wait();
  throw std::out_of_range("no analysis twin named '" + name + "'");
}

}  // namespace wcat
