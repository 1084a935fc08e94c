#pragma once

#include <cstdint>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "wcat/device.hpp"

namespace wcat {

// ---------------------------------------------------------------------------
// Register map. The address ranges and register purposes follow the reverse-
// engineered excerpt; bit layouts inside the words are simulator-defined
// constants published here so the driver, the fixtures and the tests share
// one source of truth.
// ---------------------------------------------------------------------------

inline constexpr std::uint32_t kWifiRegLo = 0x60033000;  // mapped Wi-Fi MMIO window
inline constexpr std::uint32_t kWifiRegHi = 0x60035fff;

inline constexpr std::uint32_t kRegMacAddr = 0x60033000;    // MAC address configuration
inline constexpr std::uint32_t kRegRxCtrl = 0x60033084;     // MS bit enables/disables RX
inline constexpr std::uint32_t kRegRxDmaBase = 0x60033088;  // RX DMA linked-list base
inline constexpr std::uint32_t kRegIrqReason = 0x60033c3c;  // interrupt reason (read-only)
inline constexpr std::uint32_t kRegIrqClear = 0x60033c40;   // clear interrupt bits
inline constexpr std::uint32_t kRegPower = 0x60033ca0;      // power the module up/down
inline constexpr std::uint32_t kRegTxSlotClear = 0x60033cac;  // clear TX slot
inline constexpr std::uint32_t kRegTxTrigger = 0x60033d08;  // TX DMA address + trigger

inline constexpr std::uint32_t kRegIrqSource = 0x600c2000;  // interrupt source select
inline constexpr std::uint32_t kRegIrqEnable = 0x600c2104;  // bit 1: Wi-Fi interrupt enable

// Interrupt-reason bits (positions are simulator constants).
inline constexpr std::uint32_t kIrqRxDone = 1u << 0;
inline constexpr std::uint32_t kIrqTxDone = 1u << 7;
inline constexpr std::uint32_t kIrqTxTimeout = 1u << 8;

// Register bit-field constants.
inline constexpr std::uint32_t kRxEnableBit = 1u << 31;   // MS bit of kRegRxCtrl
inline constexpr std::uint32_t kPowerBit = 1u << 12;      // set = powered, in kRegPower
inline constexpr std::uint32_t kIrqEnableBit = 1u << 1;   // in kRegIrqEnable
inline constexpr std::uint32_t kIrqSourceWifi = 1;        // interrupt number loaded on enable

// Timing constants. The simulator clock is an integer picosecond counter so
// cycle arithmetic at 160 MHz (6.25 ns/cycle) stays exact.
inline constexpr std::uint64_t kPsPerNs = 1000;
inline constexpr std::uint64_t kPsPerCycle = 6250;
inline constexpr std::uint64_t kAckLatencyMaxNs = 326000;  // protocol ACK annotation
inline constexpr std::uint64_t kRadioWindowNs = 2090;      // radio active per transmission
inline constexpr std::uint64_t kDmaConfirmBoundNs = 800;   // DMA handshake upper bound
inline constexpr std::uint64_t kTxTimeoutNs = kAckLatencyMaxNs;

// Shared memory window the DMA engine can reach.
inline constexpr std::uint32_t kRamBase = 0x3fc80000;
inline constexpr std::uint32_t kRamSize = 256 * 1024;

inline constexpr std::size_t kMaxFrameBytes = 1600;  // largest MAC frame handled

struct AccessFault : std::runtime_error {
  std::uint32_t address;
  AccessFault(const std::string& what, std::uint32_t addr)
      : std::runtime_error(what), address(addr) {}
};

// Byte-addressable RAM image; all DMA traffic must stay inside it.
class SimRam {
 public:
  SimRam() : bytes_(kRamSize, 0) {}
  bool contains(std::uint32_t addr, std::uint32_t len) const;
  std::uint8_t read8(std::uint32_t addr) const;
  void write8(std::uint32_t addr, std::uint8_t v);
  std::uint32_t read32(std::uint32_t addr) const;  // little-endian, 4-aligned
  void write32(std::uint32_t addr, std::uint32_t v);

 private:
  void check(std::uint32_t addr, std::uint32_t len, bool aligned) const;
  std::vector<std::uint8_t> bytes_;
};

// DMA descriptor: three consecutive words in SimRam.
//   word0  bit 31 owner (1 = hardware), bit 30 eof,
//          bits 23..12 filled length, bits 11..0 buffer capacity
//   word1  buffer address
//   word2  next descriptor address (0 terminates the list)
struct DmaDescriptor {
  std::uint32_t addr = 0;  // where the descriptor itself lives
  bool owner_hw = false;
  bool eof = false;
  std::uint16_t filled = 0;
  std::uint16_t capacity = 0;
  std::uint32_t buffer = 0;
  std::uint32_t next = 0;
};

DmaDescriptor read_descriptor(const SimRam& ram, std::uint32_t addr);
void write_descriptor(SimRam& ram, const DmaDescriptor& d);

// Scripted channel behaviour for one simulation run.
struct ChannelScript {
  std::uint64_t ack_latency_ns = kAckLatencyMaxNs;
  struct RxInjection {
    std::uint64_t time_ns = 0;
    std::vector<std::uint8_t> frame;
  };
  std::vector<RxInjection> rx;       // sorted by time
  std::set<std::uint64_t> drops;     // 1-based transmission ordinals with no ACK
};

// Line format: `ack_latency_ns <u64>` / `rx <time_ns> <hex bytes>` /
// `drop <n>`; '#' comments. Scripts violating the annotation bounds
// (ack latency above 326 us, frames above 1600 bytes, empty frames) are
// rejected here so simulation never outruns the analysis assumptions.
ChannelScript parse_channel_script(const std::string& text);
ChannelScript load_channel_script_file(const std::string& path);

struct SideEffect {
  enum Kind { device_op, tx_scheduled, irq_raised, warning } kind;
  std::string detail;
};

// The simulated Wi-Fi peripheral: register file, DMA engine, interrupt
// logic and a device-graph mirror, all on one deterministic event timeline.
class Peripheral {
 public:
  Peripheral(const DeviceGraph& graph, ChannelScript script, SimRam* ram);

  // MMIO. Unmapped or misaligned addresses fault; registers inside the
  // Wi-Fi window but absent from the published map read zero / ignore
  // writes with a warning. kRegIrqReason rejects writes.
  std::uint32_t mmio_read(std::uint32_t addr);
  std::vector<SideEffect> mmio_write(std::uint32_t addr, std::uint32_t word);

  // Time; processes due channel/completion events in timestamp order.
  void advance_ns(std::uint64_t delta_ns);
  void advance_cycles(std::uint64_t cycles);
  void advance_ps(std::uint64_t delta_ps);

  std::uint64_t now_ps() const { return now_ps_; }
  std::uint64_t now_ns() const { return now_ps_ / kPsPerNs; }

  const std::string& device_state() const { return state_; }
  std::uint32_t pending_irq() const { return pending_; }
  bool irq_enabled() const;
  bool irq_asserted() const { return pending_ != 0 && irq_enabled(); }

  // Every device op fired, in order — lets tests replay against the graph.
  const std::vector<std::string>& op_log() const { return op_log_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  std::uint64_t tx_started() const { return tx_ordinal_; }
  std::uint64_t rx_delivered() const { return rx_delivered_; }
  std::uint64_t rx_dropped() const { return rx_dropped_; }

  // State-change listener hook for the energy tracer: called with
  // (time_ps, new state) on every device-state transition.
  using StateListener = void (*)(void* user, std::uint64_t time_ps, const std::string& state);
  void set_state_listener(StateListener fn, void* user) {
    listener_ = fn;
    listener_user_ = user;
  }

 private:
  struct Event {
    std::uint64_t time_ps;
    std::uint64_t seq;  // tie-break: schedule order
    enum Kind { radio_window_close, ack_irq, timeout_irq, rx_inject } kind;
    std::size_t payload = 0;  // rx script index
    bool operator>(const Event& o) const {
      return time_ps != o.time_ps ? time_ps > o.time_ps : seq > o.seq;
    }
  };

  void fire_op(const std::string& op, std::vector<SideEffect>* fx);
  void raise_irq(std::uint32_t bit, std::vector<SideEffect>* fx);
  void schedule(std::uint64_t time_ps, Event::Kind kind, std::size_t payload = 0);
  void process_due(std::uint64_t until_ps);
  void deliver_rx(const std::vector<std::uint8_t>& frame);
  bool rx_ready() const;
  void warn(const std::string& msg);

  const DeviceGraph& graph_;
  ChannelScript script_;
  SimRam* ram_;
  std::string state_;
  std::uint32_t pending_ = 0;
  std::uint64_t now_ps_ = 0;
  std::uint64_t seq_ = 0;
  std::uint64_t tx_ordinal_ = 0;
  std::uint64_t rx_delivered_ = 0;
  std::uint64_t rx_dropped_ = 0;
  std::uint32_t rx_head_ = 0;  // next descriptor the DMA engine will fill
  std::map<std::uint32_t, std::uint32_t> regs_;
  std::priority_queue<Event, std::vector<Event>, std::greater<Event>> events_;
  std::vector<std::string> op_log_;
  std::vector<std::string> warnings_;
  StateListener listener_ = nullptr;
  void* listener_user_ = nullptr;
};

}  // namespace wcat
