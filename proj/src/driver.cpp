#include "wcat/driver.hpp"

#include <algorithm>

namespace wcat {
namespace {

constexpr std::uint8_t kLlcSnap[6] = {0xaa, 0xaa, 0x03, 0x00, 0x00, 0x00};

void put_le16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

std::uint16_t get_le16(const std::vector<std::uint8_t>& in, std::size_t at) {
  return static_cast<std::uint16_t>(in[at] | (in[at + 1] << 8));
}

}  // namespace

// ---------------------------------------------------------------------------
// Frames
// ---------------------------------------------------------------------------

std::vector<std::uint8_t> to_bytes(const Frame80211& f) {
  std::vector<std::uint8_t> out;
  out.reserve(kMacHeaderBytes + f.body.size());
  put_le16(out, f.frame_control);
  put_le16(out, f.duration);
  out.insert(out.end(), f.addr1.begin(), f.addr1.end());
  out.insert(out.end(), f.addr2.begin(), f.addr2.end());
  out.insert(out.end(), f.addr3.begin(), f.addr3.end());
  put_le16(out, f.seq_ctrl);
  out.insert(out.end(), f.body.begin(), f.body.end());
  return out;
}

Frame80211 parse_80211(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < kMacHeaderBytes) {
    throw DriverError("short frame: " + std::to_string(bytes.size()) +
                      " bytes cannot hold a MAC header");
  }
  if (bytes.size() > kMaxFrameBytes) {
    throw DriverError("frame exceeds the " + std::to_string(kMaxFrameBytes) + "-byte limit");
  }
  Frame80211 f;
  f.frame_control = get_le16(bytes, 0);
  f.duration = get_le16(bytes, 2);
  std::copy_n(bytes.begin() + 4, 6, f.addr1.begin());
  std::copy_n(bytes.begin() + 10, 6, f.addr2.begin());
  std::copy_n(bytes.begin() + 16, 6, f.addr3.begin());
  f.seq_ctrl = get_le16(bytes, 22);
  f.body.assign(bytes.begin() + kMacHeaderBytes, bytes.end());
  return f;
}

Frame80211 mac_encapsulate(const Frame8023& frame, const MacAddr& bssid) {
  if (frame.payload.size() > costs::kMaxPayload) {
    throw DriverError("payload exceeds " + std::to_string(costs::kMaxPayload) + " bytes");
  }
  Frame80211 w;
  w.frame_control = kFcTypeData | kFcToDs;
  w.addr1 = bssid;       // receiver: the access point
  w.addr2 = frame.src;   // transmitter
  w.addr3 = frame.dst;   // final destination
  w.body.assign(std::begin(kLlcSnap), std::end(kLlcSnap));
  w.body.push_back(static_cast<std::uint8_t>(frame.ethertype >> 8));
  w.body.push_back(static_cast<std::uint8_t>(frame.ethertype & 0xff));
  w.body.insert(w.body.end(), frame.payload.begin(), frame.payload.end());
  return w;
}

// ---------------------------------------------------------------------------
// Context plumbing
// ---------------------------------------------------------------------------

DriverContext make_context(Peripheral* periph, SimRam* ram) {
  DriverContext ctx;
  ctx.periph = periph;
  ctx.ram = ram;
  return ctx;
}

void spend(DriverContext& ctx, std::uint64_t cycles) {
  ctx.cycles += cycles;
  ctx.periph->advance_cycles(cycles);
}

// ---------------------------------------------------------------------------
// Power and interrupt bring-up
// ---------------------------------------------------------------------------

void wifi_hw_init(DriverContext& ctx) {
  spend(ctx, costs::hw_init::enter);
  ctx.periph->mmio_write(kRegPower, kPowerBit);
  spend(ctx, costs::hw_init::power);
  spend(ctx, costs::hw_init::leave);
}

void wifi_hw_deinit(DriverContext& ctx) {
  spend(ctx, costs::hw_deinit::enter);
  ctx.periph->mmio_write(kRegPower, 0);
  spend(ctx, costs::hw_deinit::power);
  spend(ctx, costs::hw_deinit::leave);
}

void wifi_setup_interrupt(DriverContext& ctx) {
  // Four-step bring-up: clear the source register, mask the enable bit,
  // register the handler, then select the source and set the enable bit.
  ctx.periph->mmio_write(kRegIrqSource, 0);
  spend(ctx, costs::setup_interrupt::clear_source);
  std::uint32_t enable = ctx.periph->mmio_read(kRegIrqEnable);
  ctx.periph->mmio_write(kRegIrqEnable, enable & ~kIrqEnableBit);
  spend(ctx, costs::setup_interrupt::clear_enable);
  ctx.handler_registered = true;
  spend(ctx, costs::setup_interrupt::register_handler);
  ctx.periph->mmio_write(kRegIrqSource, kIrqSourceWifi);
  enable = ctx.periph->mmio_read(kRegIrqEnable);
  ctx.periph->mmio_write(kRegIrqEnable, enable | kIrqEnableBit);
  spend(ctx, costs::setup_interrupt::enable);
}

void wifi_setup_rx(DriverContext& ctx) {
  static_assert(costs::kRxPoolSize > 0, "the RX pool is sized at build time");
  spend(ctx, costs::setup_rx::enter);
  for (unsigned i = 0; i < costs::kRxPoolSize; ++i) {
    DmaDescriptor d;
    d.addr = rx_desc_addr(i);
    d.owner_hw = true;
    d.capacity = kMaxFrameBytes;
    d.buffer = rx_buf_addr(i);
    d.next = i + 1 < costs::kRxPoolSize ? rx_desc_addr(i + 1) : 0;
    write_descriptor(*ctx.ram, d);
    spend(ctx, costs::setup_rx::per_descriptor);
  }
  ctx.periph->mmio_write(kRegRxDmaBase, rx_desc_addr(0));
  spend(ctx, costs::setup_rx::write_base);
  std::uint32_t ctrl = ctx.periph->mmio_read(kRegRxCtrl);
  ctx.periph->mmio_write(kRegRxCtrl, ctrl | kRxEnableBit);
  spend(ctx, costs::setup_rx::enable);
  // Bounded confirmation wait: the DMA handshake settles within 800 ns.
  for (unsigned i = 0; i < costs::kDmaConfirmCycles; ++i) {
    spend(ctx, costs::setup_rx::confirm_iter);
  }
  spend(ctx, costs::setup_rx::leave);
}

// ---------------------------------------------------------------------------
// Transmission
// ---------------------------------------------------------------------------

void wifi_transmit_packet(DriverContext& ctx, const Frame80211& frame, unsigned slot) {
  spend(ctx, costs::transmit_packet::validate);
  if (slot >= costs::kTxSlots) {
    throw DriverError("TX slot " + std::to_string(slot) + " out of range");
  }
  if (ctx.tx_slot_busy[slot]) {
    throw DriverError("TX slot " + std::to_string(slot) + " busy");
  }
  std::vector<std::uint8_t> bytes = to_bytes(frame);
  if (bytes.size() > kMaxFrameBytes) {
    throw DriverError("frame exceeds the " + std::to_string(kMaxFrameBytes) + "-byte limit");
  }
  spend(ctx, costs::transmit_packet::header);
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    ctx.ram->write8(tx_buf_addr(slot) + static_cast<std::uint32_t>(i), bytes[i]);
  }
  spend(ctx, costs::transmit_packet::descriptor);
  DmaDescriptor d;
  d.addr = tx_desc_addr(slot);
  d.owner_hw = true;
  d.eof = true;
  d.filled = static_cast<std::uint16_t>(bytes.size());
  d.capacity = kMaxFrameBytes;
  d.buffer = tx_buf_addr(slot);
  write_descriptor(*ctx.ram, d);
  ctx.periph->mmio_write(kRegTxTrigger, tx_desc_addr(slot));
  spend(ctx, costs::transmit_packet::trigger);
  ctx.tx_slot_busy[slot] = true;
  ctx.tx_in_flight = static_cast<int>(slot);
  spend(ctx, costs::transmit_packet::leave);
}

TxOutcome wifi_wait_for_tx(DriverContext& ctx) {
  spend(ctx, costs::wait_for_tx::enter);
  TxOutcome outcome = TxOutcome::timeout;
  for (unsigned i = 0; i < costs::kAckWaitCycles; ++i) {
    spend(ctx, costs::wait_for_tx::poll_iter);
    std::uint32_t reason = ctx.periph->mmio_read(kRegIrqReason);
    if ((reason & kIrqTxDone) != 0) {
      outcome = TxOutcome::acked;
      break;
    }
    if ((reason & kIrqTxTimeout) != 0) break;
  }
  spend(ctx, costs::wait_for_tx::leave);
  return outcome;
}

void wifi_process_tx_done(DriverContext& ctx) {
  spend(ctx, costs::process_tx_done::enter);
  bool pending = (ctx.periph->mmio_read(kRegIrqReason) & kIrqTxDone) != 0;
  if (!pending && ctx.tx_in_flight < 0) return;  // nothing to complete
  ctx.periph->mmio_write(kRegIrqClear, kIrqTxDone);
  spend(ctx, costs::process_tx_done::clear_irq);
  unsigned slot = ctx.tx_in_flight >= 0 ? static_cast<unsigned>(ctx.tx_in_flight) : 0;
  ctx.periph->mmio_write(kRegTxSlotClear, 1u << slot);
  ctx.tx_slot_busy[slot] = false;
  ctx.tx_in_flight = -1;
  spend(ctx, costs::process_tx_done::clear_slot);
  spend(ctx, costs::process_tx_done::leave);
}

void wifi_process_timeout(DriverContext& ctx) {
  spend(ctx, costs::process_timeout::enter);
  bool pending = (ctx.periph->mmio_read(kRegIrqReason) & kIrqTxTimeout) != 0;
  if (!pending && ctx.tx_in_flight < 0) return;
  ctx.periph->mmio_write(kRegIrqClear, kIrqTxTimeout);
  spend(ctx, costs::process_timeout::clear_irq);
  unsigned slot = ctx.tx_in_flight >= 0 ? static_cast<unsigned>(ctx.tx_in_flight) : 0;
  ctx.periph->mmio_write(kRegTxSlotClear, 1u << slot);
  ctx.tx_slot_busy[slot] = false;
  ctx.tx_in_flight = -1;
  spend(ctx, costs::process_timeout::clear_slot);
}

// ---------------------------------------------------------------------------
// Reception
// ---------------------------------------------------------------------------

std::size_t wifi_handle_rx(DriverContext& ctx) {
  spend(ctx, costs::handle_rx::enter);
  std::size_t count = 0;
  unsigned i = 0;
  while (i < costs::kRxPoolSize) {
    DmaDescriptor head = read_descriptor(*ctx.ram, rx_desc_addr(i));
    if (head.owner_hw || head.filled == 0) break;  // hardware still owns the rest
    // Reassemble one frame (it may span descriptors, EOF marks the tail).
    std::vector<std::uint8_t> bytes;
    bool complete = false;
    while (i < costs::kRxPoolSize) {
      DmaDescriptor d = read_descriptor(*ctx.ram, rx_desc_addr(i));
      if (d.owner_hw) break;
      for (std::uint16_t k = 0; k < d.filled; ++k) {
        bytes.push_back(ctx.ram->read8(d.buffer + k));
      }
      ++i;
      if (d.eof) {
        complete = true;
        break;
      }
    }
    if (!complete) break;
    spend(ctx, costs::handle_rx::per_frame);
    // Move the packet into the MAC frame pool and queue it for the MAC task;
    // exhaustion drops the frame but never loses count of it.
    int slot = -1;
    for (unsigned j = 0; j < costs::kRxPoolSize; ++j) {
      if (!ctx.mac_pool_busy[j]) {
        slot = static_cast<int>(j);
        break;
      }
    }
    if (slot < 0) {
      ++ctx.rx_dropped_frames;
      continue;
    }
    for (std::size_t k = 0; k < bytes.size(); ++k) {
      ctx.ram->write8(mac_pool_addr(static_cast<unsigned>(slot)) + static_cast<std::uint32_t>(k),
                      bytes[k]);
    }
    MacEvent ev;
    ev.pool_slot = static_cast<std::uint8_t>(slot);
    ev.buffer = mac_pool_addr(static_cast<unsigned>(slot));
    ev.length = static_cast<std::uint16_t>(bytes.size());
    if (!ctx.mac_event_queue.push(ev)) {
      ++ctx.rx_dropped_frames;
      continue;
    }
    ctx.mac_pool_busy[static_cast<unsigned>(slot)] = true;
    ++count;
  }
  // Re-arm the whole list and hand it back to the hardware.
  for (unsigned j = 0; j < costs::kRxPoolSize; ++j) {
    DmaDescriptor d;
    d.addr = rx_desc_addr(j);
    d.owner_hw = true;
    d.capacity = kMaxFrameBytes;
    d.buffer = rx_buf_addr(j);
    d.next = j + 1 < costs::kRxPoolSize ? rx_desc_addr(j + 1) : 0;
    write_descriptor(*ctx.ram, d);
  }
  ctx.periph->mmio_write(kRegRxDmaBase, rx_desc_addr(0));
  ctx.periph->mmio_write(kRegIrqClear, kIrqRxDone);
  spend(ctx, costs::handle_rx::leave);
  return count;
}

Frame8023 wifi_mac_handle_rx(DriverContext& ctx, const Frame80211& frame) {
  if ((frame.frame_control & 0x0c) != kFcTypeData) {
    throw DriverError("not a data frame");
  }
  bool to_ds = (frame.frame_control & kFcToDs) != 0;
  bool from_ds = (frame.frame_control & kFcFromDs) != 0;
  if (to_ds && from_ds) throw DriverError("four-address frames are not supported");
  if (frame.body.size() < kLlcSnapBytes) {
    throw DriverError("short frame: missing LLC/SNAP header");
  }
  if (!std::equal(std::begin(kLlcSnap), std::end(kLlcSnap), frame.body.begin())) {
    throw DriverError("malformed LLC/SNAP header");
  }
  std::size_t payload_len = frame.body.size() - kLlcSnapBytes;
  if (payload_len > costs::kMaxPayload) {
    throw DriverError("payload exceeds " + std::to_string(costs::kMaxPayload) + " bytes");
  }
  spend(ctx, costs::mac_handle_rx::enter);
  Frame8023 out;
  if (to_ds) {  // station -> AP: destination rides in addr3
    out.dst = frame.addr3;
    out.src = frame.addr2;
  } else if (from_ds) {  // AP -> station: source rides in addr3
    out.dst = frame.addr1;
    out.src = frame.addr3;
  } else {
    out.dst = frame.addr1;
    out.src = frame.addr2;
  }
  out.ethertype = static_cast<std::uint16_t>((frame.body[6] << 8) | frame.body[7]);
  out.payload.reserve(payload_len);
  // Moves the payload between buffers one byte at a time — the dominant cost.
  for (std::size_t k = 0; k < payload_len; ++k) {
    out.payload.push_back(frame.body[kLlcSnapBytes + k]);
    spend(ctx, costs::mac_handle_rx::per_byte);
  }
  spend(ctx, costs::mac_handle_rx::leave);
  return out;
}

// ---------------------------------------------------------------------------
// Interrupt path and tasks
// ---------------------------------------------------------------------------

MacAddr wifi_get_bssid(DriverContext& ctx) {
  spend(ctx, costs::get_bssid::enter);
  MacAddr out{};
  for (unsigned i = 0; i < costs::kMacBytes; ++i) {
    out[i] = ctx.bssid[i];
    spend(ctx, costs::get_bssid::per_byte);
  }
  spend(ctx, costs::get_bssid::leave);
  return out;
}

void wifi_interrupt_handler(DriverContext& ctx) {
  spend(ctx, costs::interrupt_handler::enter);
  std::uint32_t reason = ctx.periph->mmio_read(kRegIrqReason);
  spend(ctx, costs::interrupt_handler::read_reason);
  HwEvent ev;
  ev.kind = HwEvent::interrupt;
  ev.reasons = reason;  // forwarded verbatim; processing is deferred
  if (!ctx.hw_event_queue.push(ev)) ++ctx.hw_event_drops;
  spend(ctx, costs::interrupt_handler::enqueue);
  // Acknowledge exactly the captured bits so the line drops.
  ctx.periph->mmio_write(kRegIrqClear, reason);
  spend(ctx, costs::interrupt_handler::ack);
}

TxReport tx_task_run(DriverContext& ctx, const Frame8023& frame) {
  std::uint64_t start = ctx.cycles;
  spend(ctx, costs::tx_task::enter);
  Frame80211 w = mac_encapsulate(frame, ctx.bssid);
  wifi_transmit_packet(ctx, w, 0);
  // Busy-drain the radio-active window, then sleep the module: the air
  // exchange is over, only the completion posting is still outstanding.
  spend(ctx, costs::tx_task::drain);
  ctx.periph->mmio_write(kRegPower, 0);
  spend(ctx, costs::tx_task::gate);
  std::uint64_t iterations = 0;
  std::uint32_t reason = 0;
  while (iterations < costs::tx_task::poll_bound) {
    spend(ctx, costs::tx_task::poll_iter);
    ++iterations;
    reason = ctx.periph->mmio_read(kRegIrqReason);
    if ((reason & (kIrqTxDone | kIrqTxTimeout)) != 0) break;
  }
  ctx.periph->mmio_write(kRegPower, kPowerBit);
  spend(ctx, costs::tx_task::wake);
  TxReport report;
  report.poll_iterations = iterations;
  if ((reason & kIrqTxDone) != 0) {
    report.outcome = TxOutcome::acked;
    wifi_process_tx_done(ctx);
  } else {
    report.outcome = TxOutcome::timeout;
    wifi_process_timeout(ctx);
  }
  spend(ctx, costs::tx_task::leave);
  report.cycles = ctx.cycles - start;
  return report;
}

bool driver_task_step(DriverContext& ctx) {
  std::optional<HwEvent> ev = ctx.hw_event_queue.pop();
  if (!ev) return false;
  if (ev->kind == HwEvent::interrupt) {
    if ((ev->reasons & kIrqRxDone) != 0) wifi_handle_rx(ctx);
    if ((ev->reasons & kIrqTxDone) != 0) wifi_process_tx_done(ctx);
    if ((ev->reasons & kIrqTxTimeout) != 0) wifi_process_timeout(ctx);
    return true;
  }
  // tx_request: encapsulate and transmit on the first free slot.
  Frame80211 w = mac_encapsulate(ev->frame, ctx.bssid);
  for (unsigned s = 0; s < costs::kTxSlots; ++s) {
    if (!ctx.tx_slot_busy[s]) {
      wifi_transmit_packet(ctx, w, s);
      return true;
    }
  }
  throw DriverError("all TX slots busy");
}

std::optional<Frame8023> mac_task_step(DriverContext& ctx) {
  std::optional<MacEvent> ev = ctx.mac_event_queue.pop();
  if (!ev) return std::nullopt;
  std::vector<std::uint8_t> bytes;
  bytes.reserve(ev->length);
  for (std::uint16_t k = 0; k < ev->length; ++k) {
    bytes.push_back(ctx.ram->read8(ev->buffer + k));
  }
  ctx.mac_pool_busy[ev->pool_slot] = false;
  Frame80211 f = parse_80211(bytes);
  return wifi_mac_handle_rx(ctx, f);
}

}  // namespace wcat
