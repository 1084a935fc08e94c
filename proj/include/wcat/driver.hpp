#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wcat/driver_costs.hpp"
#include "wcat/peripheral.hpp"

namespace wcat {

struct DriverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using MacAddr = std::array<std::uint8_t, 6>;

// ---------------------------------------------------------------------------
// Frames. The driver accepts Ethernet (802.3) frames from the network stack
// and converts them to 802.11 data frames carrying an LLC/SNAP header.
// ---------------------------------------------------------------------------

struct Frame8023 {
  MacAddr dst{};
  MacAddr src{};
  std::uint16_t ethertype = 0;
  std::vector<std::uint8_t> payload;  // <= costs::kMaxPayload bytes

  bool operator==(const Frame8023&) const = default;
};

struct Frame80211 {
  std::uint16_t frame_control = 0;
  std::uint16_t duration = 0;
  MacAddr addr1{};  // receiver
  MacAddr addr2{};  // transmitter
  MacAddr addr3{};  // remaining endpoint, per the to/from-DS bits
  std::uint16_t seq_ctrl = 0;
  std::vector<std::uint8_t> body;  // LLC/SNAP + payload

  bool operator==(const Frame80211&) const = default;
};

// Frame-control bits (802.11, little-endian u16 on the wire).
inline constexpr std::uint16_t kFcTypeData = 2u << 2;
inline constexpr std::uint16_t kFcToDs = 1u << 8;
inline constexpr std::uint16_t kFcFromDs = 1u << 9;
inline constexpr std::size_t kMacHeaderBytes = 24;
inline constexpr std::size_t kLlcSnapBytes = 8;

std::vector<std::uint8_t> to_bytes(const Frame80211& f);
Frame80211 parse_80211(const std::vector<std::uint8_t>& bytes);  // throws DriverError

// Adds the Wi-Fi MAC header (to-DS data frame addressed at the BSSID) and
// the LLC/SNAP encapsulation of the ethertype. Inverse of
// wifi_mac_handle_rx on the payload bytes.
Frame80211 mac_encapsulate(const Frame8023& frame, const MacAddr& bssid);

// ---------------------------------------------------------------------------
// Bounded queues: capacity fixed at construction, storage never reallocated
// after init, push fails (returns false) when full.
// ---------------------------------------------------------------------------

template <typename T>
class BoundedQueue {
 public:
  explicit BoundedQueue(std::size_t cap) : storage_(cap) {}
  bool push(T v) {
    if (size_ == storage_.size()) return false;
    storage_[(head_ + size_) % storage_.size()] = std::move(v);
    ++size_;
    return true;
  }
  std::optional<T> pop() {
    if (size_ == 0) return std::nullopt;
    T v = std::move(storage_[head_]);
    head_ = (head_ + 1) % storage_.size();
    --size_;
    return v;
  }
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return storage_.size(); }
  bool empty() const { return size_ == 0; }
  const void* storage_address() const { return storage_.data(); }  // static-pool check

 private:
  std::vector<T> storage_;
  std::size_t head_ = 0;
  std::size_t size_ = 0;
};

struct HwEvent {
  enum Kind { interrupt, tx_request } kind = interrupt;
  std::uint32_t reasons = 0;  // interrupt-reason bits, forwarded verbatim
  Frame8023 frame;            // tx_request payload
};

struct MacEvent {  // one received packet, parked in the MAC frame pool
  std::uint8_t pool_slot = 0;
  std::uint32_t buffer = 0;
  std::uint16_t length = 0;
};

// ---------------------------------------------------------------------------
// Static memory map: every descriptor and buffer the driver touches is
// carved out of SimRam at a fixed address — nothing is allocated after init.
// ---------------------------------------------------------------------------

inline constexpr std::uint32_t kBufStride = 1664;  // 1600 rounded up to words
inline constexpr std::uint32_t kRxDescBase = kRamBase + 0x100;
inline constexpr std::uint32_t kTxDescBase = kRamBase + 0x200;
inline constexpr std::uint32_t kRxBufBase = kRamBase + 0x1000;
inline constexpr std::uint32_t kTxBufBase = kRamBase + 0x5000;
inline constexpr std::uint32_t kMacPoolBase = kRamBase + 0x8000;

inline constexpr std::uint32_t rx_desc_addr(unsigned i) { return kRxDescBase + i * 16; }
inline constexpr std::uint32_t rx_buf_addr(unsigned i) { return kRxBufBase + i * kBufStride; }
inline constexpr std::uint32_t tx_desc_addr(unsigned s) { return kTxDescBase + s * 16; }
inline constexpr std::uint32_t tx_buf_addr(unsigned s) { return kTxBufBase + s * kBufStride; }
inline constexpr std::uint32_t mac_pool_addr(unsigned i) { return kMacPoolBase + i * kBufStride; }

enum class TxOutcome { acked, timeout };

struct TxReport {
  TxOutcome outcome = TxOutcome::timeout;
  std::uint64_t cycles = 0;           // task cycles, spend-accounted
  std::uint64_t poll_iterations = 0;  // completion-poll iterations taken
};

struct DriverContext {
  Peripheral* periph = nullptr;
  SimRam* ram = nullptr;
  BoundedQueue<HwEvent> hw_event_queue{costs::kQueueCapacity};
  BoundedQueue<MacEvent> mac_event_queue{costs::kQueueCapacity};
  MacAddr bssid{};  // all-zero until configured
  std::array<bool, costs::kTxSlots> tx_slot_busy{};
  std::array<bool, costs::kRxPoolSize> mac_pool_busy{};
  int tx_in_flight = -1;  // slot of the transmission being waited on
  bool handler_registered = false;
  std::uint64_t cycles = 0;             // cumulative cycle accounting
  std::uint64_t rx_dropped_frames = 0;  // MAC queue or frame pool exhausted
  std::uint64_t hw_event_drops = 0;     // hardware event queue exhausted
};

DriverContext make_context(Peripheral* periph, SimRam* ram);

// Advances both the cycle account and the simulated clock; every driver
// function spends its calibrated block budgets through here.
void spend(DriverContext& ctx, std::uint64_t cycles);

// --- Operations (one per published table row) ------------------------------

void wifi_hw_init(DriverContext& ctx);
void wifi_hw_deinit(DriverContext& ctx);
void wifi_setup_interrupt(DriverContext& ctx);
void wifi_setup_rx(DriverContext& ctx);
void wifi_transmit_packet(DriverContext& ctx, const Frame80211& frame, unsigned slot);
TxOutcome wifi_wait_for_tx(DriverContext& ctx);
void wifi_process_tx_done(DriverContext& ctx);
std::size_t wifi_handle_rx(DriverContext& ctx);  // returns frames forwarded
void wifi_process_timeout(DriverContext& ctx);
MacAddr wifi_get_bssid(DriverContext& ctx);
Frame8023 wifi_mac_handle_rx(DriverContext& ctx, const Frame80211& frame);
void wifi_interrupt_handler(DriverContext& ctx);

// The transmission task: encapsulate, transmit, actively wait for the
// completion interrupt (device asleep during the idle wait), handle the
// outcome. Returns the outcome plus cycle accounting.
TxReport tx_task_run(DriverContext& ctx, const Frame8023& frame);

// Cooperatively scheduled task steps (run-to-completion per event).
bool driver_task_step(DriverContext& ctx);
std::optional<Frame8023> mac_task_step(DriverContext& ctx);

}  // namespace wcat
