#pragma once

#include <string>
#include <vector>

#include "wcat/program.hpp"

namespace wcat {

// Analysis twins: one annotated CFG per driver function, generated from the
// same calibration table the executable model spends from, so the analyzed
// bounds and the simulated costs can never drift apart.

WcirProgram twin_hw_init();
WcirProgram twin_hw_deinit();
WcirProgram twin_setup_interrupt();
WcirProgram twin_setup_rx();
WcirProgram twin_transmit_packet();
WcirProgram twin_wait_for_tx();
WcirProgram twin_process_tx_done();
WcirProgram twin_handle_rx();
WcirProgram twin_process_timeout();
WcirProgram twin_get_bssid();
WcirProgram twin_mac_handle_rx();
WcirProgram twin_interrupt_handler();
WcirProgram twin_tx_task();
WcirProgram twin_tx_task_standby_wait();  // same shape, Standby wait policy

struct TwinEntry {
  std::string name;
  WcirProgram (*build)();
  unsigned published_wcet;  // cycles
};

// The twelve driver functions, in published table order (excludes the task).
const std::vector<TwinEntry>& driver_twins();

// All twins including the TX task, keyed by program name.
WcirProgram twin_by_name(const std::string& name);  // throws std::out_of_range

}  // namespace wcat
