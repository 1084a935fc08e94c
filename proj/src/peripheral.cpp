#include "wcat/peripheral.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace wcat {
namespace {

constexpr std::size_t kMaxDescriptorWalk = 64;  // guards against cyclic lists

bool is_tabled(std::uint32_t addr) {
  switch (addr) {
    case kRegMacAddr:
    case kRegRxCtrl:
    case kRegRxDmaBase:
    case kRegIrqReason:
    case kRegIrqClear:
    case kRegPower:
    case kRegTxSlotClear:
    case kRegTxTrigger:
    case kRegIrqSource:
    case kRegIrqEnable:
      return true;
    default:
      return false;
  }
}

std::string hex32(std::uint32_t v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "0x%08x", v);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// SimRam
// ---------------------------------------------------------------------------

void SimRam::check(std::uint32_t addr, std::uint32_t len, bool aligned) const {
  if (addr < kRamBase || addr - kRamBase > kRamSize - len) {
    throw AccessFault("memory access outside simulated RAM at " + hex32(addr), addr);
  }
  if (aligned && addr % 4 != 0) {
    throw AccessFault("misaligned word access at " + hex32(addr), addr);
  }
}

bool SimRam::contains(std::uint32_t addr, std::uint32_t len) const {
  return addr >= kRamBase && len <= kRamSize && addr - kRamBase <= kRamSize - len;
}

std::uint8_t SimRam::read8(std::uint32_t addr) const {
  check(addr, 1, false);
  return bytes_[addr - kRamBase];
}

void SimRam::write8(std::uint32_t addr, std::uint8_t v) {
  check(addr, 1, false);
  bytes_[addr - kRamBase] = v;
}

std::uint32_t SimRam::read32(std::uint32_t addr) const {
  check(addr, 4, true);
  std::uint32_t off = addr - kRamBase;
  return static_cast<std::uint32_t>(bytes_[off]) |
         (static_cast<std::uint32_t>(bytes_[off + 1]) << 8) |
         (static_cast<std::uint32_t>(bytes_[off + 2]) << 16) |
         (static_cast<std::uint32_t>(bytes_[off + 3]) << 24);
}

void SimRam::write32(std::uint32_t addr, std::uint32_t v) {
  check(addr, 4, true);
  std::uint32_t off = addr - kRamBase;
  bytes_[off] = static_cast<std::uint8_t>(v & 0xff);
  bytes_[off + 1] = static_cast<std::uint8_t>((v >> 8) & 0xff);
  bytes_[off + 2] = static_cast<std::uint8_t>((v >> 16) & 0xff);
  bytes_[off + 3] = static_cast<std::uint8_t>((v >> 24) & 0xff);
}

// ---------------------------------------------------------------------------
// DMA descriptors
// ---------------------------------------------------------------------------

DmaDescriptor read_descriptor(const SimRam& ram, std::uint32_t addr) {
  DmaDescriptor d;
  d.addr = addr;
  std::uint32_t w0 = ram.read32(addr);
  d.owner_hw = (w0 >> 31) & 1;
  d.eof = (w0 >> 30) & 1;
  d.filled = static_cast<std::uint16_t>((w0 >> 12) & 0xfff);
  d.capacity = static_cast<std::uint16_t>(w0 & 0xfff);
  d.buffer = ram.read32(addr + 4);
  d.next = ram.read32(addr + 8);
  return d;
}

void write_descriptor(SimRam& ram, const DmaDescriptor& d) {
  std::uint32_t w0 = (static_cast<std::uint32_t>(d.owner_hw) << 31) |
                     (static_cast<std::uint32_t>(d.eof) << 30) |
                     ((static_cast<std::uint32_t>(d.filled) & 0xfff) << 12) |
                     (static_cast<std::uint32_t>(d.capacity) & 0xfff);
  ram.write32(d.addr, w0);
  ram.write32(d.addr + 4, d.buffer);
  ram.write32(d.addr + 8, d.next);
}

// ---------------------------------------------------------------------------
// Channel scripts
// ---------------------------------------------------------------------------

namespace {

std::uint64_t parse_u64(const std::string& tok, int line, const char* what) {
  if (tok.empty() || !std::all_of(tok.begin(), tok.end(),
                                  [](unsigned char c) { return std::isdigit(c); })) {
    throw std::runtime_error("channel script line " + std::to_string(line) + ": " +
                             what + " must be a non-negative integer, got '" + tok + "'");
  }
  try {
    return std::stoull(tok);
  } catch (const std::exception&) {
    throw std::runtime_error("channel script line " + std::to_string(line) + ": " +
                             what + " out of range: '" + tok + "'");
  }
}

int hex_nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

ChannelScript parse_channel_script(const std::string& text) {
  ChannelScript script;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (auto pos = raw.find('#'); pos != std::string::npos) raw.erase(pos);
    std::istringstream ls(raw);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    auto fail = [&](const std::string& msg) {
      throw std::runtime_error("channel script line " + std::to_string(lineno) + ": " + msg);
    };
    if (tok[0] == "ack_latency_ns") {
      if (tok.size() != 2) fail("expected 'ack_latency_ns <nanoseconds>'");
      script.ack_latency_ns = parse_u64(tok[1], lineno, "ack latency");
      if (script.ack_latency_ns > kAckLatencyMaxNs) {
        fail("ack latency " + tok[1] + " exceeds the protocol bound of " +
             std::to_string(kAckLatencyMaxNs) + " ns");
      }
    } else if (tok[0] == "rx") {
      if (tok.size() != 3) fail("expected 'rx <time_ns> <hex bytes>'");
      ChannelScript::RxInjection inj;
      inj.time_ns = parse_u64(tok[1], lineno, "rx time");
      const std::string& hex = tok[2];
      if (hex.empty() || hex.size() % 2 != 0) fail("frame hex must have even, non-zero length");
      for (std::size_t i = 0; i < hex.size(); i += 2) {
        int hi = hex_nibble(hex[i]), lo = hex_nibble(hex[i + 1]);
        if (hi < 0 || lo < 0) fail("invalid hex digit in frame payload");
        inj.frame.push_back(static_cast<std::uint8_t>(hi * 16 + lo));
      }
      if (inj.frame.size() > kMaxFrameBytes) {
        fail("frame of " + std::to_string(inj.frame.size()) + " bytes exceeds the " +
             std::to_string(kMaxFrameBytes) + "-byte limit");
      }
      script.rx.push_back(std::move(inj));
    } else if (tok[0] == "drop") {
      if (tok.size() != 2) fail("expected 'drop <transmission ordinal>'");
      std::uint64_t n = parse_u64(tok[1], lineno, "drop ordinal");
      if (n == 0) fail("drop ordinals are 1-based");
      script.drops.insert(n);
    } else {
      fail("unknown directive '" + tok[0] + "'");
    }
  }
  std::stable_sort(script.rx.begin(), script.rx.end(),
                   [](const auto& a, const auto& b) { return a.time_ns < b.time_ns; });
  return script;
}

ChannelScript load_channel_script_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open channel script: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_channel_script(ss.str());
}

// ---------------------------------------------------------------------------
// Peripheral
// ---------------------------------------------------------------------------

Peripheral::Peripheral(const DeviceGraph& graph, ChannelScript script, SimRam* ram)
    : graph_(graph), script_(std::move(script)), ram_(ram), state_(graph.initial) {
  for (std::size_t i = 0; i < script_.rx.size(); ++i) {
    schedule(script_.rx[i].time_ns * kPsPerNs, Event::rx_inject, i);
  }
}

bool Peripheral::irq_enabled() const {
  auto src = regs_.find(kRegIrqSource);
  auto en = regs_.find(kRegIrqEnable);
  return src != regs_.end() && src->second == kIrqSourceWifi && en != regs_.end() &&
         (en->second & kIrqEnableBit) != 0;
}

void Peripheral::warn(const std::string& msg) { warnings_.push_back(msg); }

void Peripheral::fire_op(const std::string& op, std::vector<SideEffect>* fx) {
  bool inert = false;
  std::string next = step(graph_, state_, op, &inert);
  op_log_.push_back(op);
  if (inert) {
    warn("inert device op '" + op + "' in state " + state_);
    if (fx) fx->push_back({SideEffect::warning, "inert op " + op + " in " + state_});
    return;
  }
  state_ = next;
  if (fx) fx->push_back({SideEffect::device_op, op + " -> " + state_});
  if (listener_) listener_(listener_user_, now_ps_, state_);
}

void Peripheral::raise_irq(std::uint32_t bit, std::vector<SideEffect>* fx) {
  pending_ |= bit;
  if (fx) fx->push_back({SideEffect::irq_raised, hex32(bit)});
}

void Peripheral::schedule(std::uint64_t time_ps, Event::Kind kind, std::size_t payload) {
  events_.push(Event{time_ps, seq_++, kind, payload});
}

std::uint32_t Peripheral::mmio_read(std::uint32_t addr) {
  if (addr == kRegIrqSource || addr == kRegIrqEnable ||
      (addr >= kWifiRegLo && addr <= kWifiRegHi)) {
    if (addr % 4 != 0) throw AccessFault("misaligned register read at " + hex32(addr), addr);
    if (addr == kRegIrqReason) return pending_;
    if (!is_tabled(addr)) {
      warn("read from unmapped register " + hex32(addr) + " returns zero");
      return 0;
    }
    auto it = regs_.find(addr);
    return it == regs_.end() ? 0 : it->second;
  }
  throw AccessFault("MMIO read outside the device window at " + hex32(addr), addr);
}

std::vector<SideEffect> Peripheral::mmio_write(std::uint32_t addr, std::uint32_t word) {
  std::vector<SideEffect> fx;
  bool in_window = addr >= kWifiRegLo && addr <= kWifiRegHi;
  if (!in_window && addr != kRegIrqSource && addr != kRegIrqEnable) {
    throw AccessFault("MMIO write outside the device window at " + hex32(addr), addr);
  }
  if (addr % 4 != 0) throw AccessFault("misaligned register write at " + hex32(addr), addr);
  if (addr == kRegIrqReason) {
    throw AccessFault("write to read-only interrupt-reason register", addr);
  }
  if (!is_tabled(addr)) {
    warn("write to unmapped register " + hex32(addr) + " ignored");
    fx.push_back({SideEffect::warning, "ignored write to " + hex32(addr)});
    return fx;
  }

  auto arm_rx = [&] {
    std::uint32_t ctrl = regs_[kRegRxCtrl];
    std::uint32_t base = regs_[kRegRxDmaBase];
    rx_head_ = ((ctrl & kRxEnableBit) != 0 && base != 0) ? base : 0;
  };

  regs_[addr] = word;
  switch (addr) {
    case kRegRxCtrl:
    case kRegRxDmaBase:
      arm_rx();
      break;
    case kRegPower:
      fire_op((word & kPowerBit) != 0 ? "wifi_power_up" : "wifi_power_down", &fx);
      break;
    case kRegTxTrigger: {
      DmaDescriptor d = read_descriptor(*ram_, word);
      if (!d.owner_hw) {
        warn("tx trigger for descriptor " + hex32(word) + " not owned by hardware");
        fx.push_back({SideEffect::warning, "tx descriptor not armed"});
        break;
      }
      if (d.filled == 0 || d.filled > d.capacity) {
        throw AccessFault("tx descriptor at " + hex32(word) + " has invalid fill", word);
      }
      ++tx_ordinal_;
      fire_op("tx_start", &fx);
      schedule(now_ps_ + kRadioWindowNs * kPsPerNs, Event::radio_window_close, word);
      if (script_.drops.count(tx_ordinal_) != 0) {
        schedule(now_ps_ + kTxTimeoutNs * kPsPerNs, Event::timeout_irq);
      } else {
        schedule(now_ps_ + script_.ack_latency_ns * kPsPerNs, Event::ack_irq);
      }
      fx.push_back({SideEffect::tx_scheduled,
                    "tx #" + std::to_string(tx_ordinal_) + " from " + hex32(word)});
      break;
    }
    case kRegIrqClear:
      pending_ &= ~word;
      break;
    default:
      break;  // plain storage registers
  }
  return fx;
}

bool Peripheral::rx_ready() const {
  auto power = regs_.find(kRegPower);
  auto ctrl = regs_.find(kRegRxCtrl);
  return power != regs_.end() && (power->second & kPowerBit) != 0 && ctrl != regs_.end() &&
         (ctrl->second & kRxEnableBit) != 0 && rx_head_ != 0;
}

void Peripheral::deliver_rx(const std::vector<std::uint8_t>& frame) {
  if (!rx_ready()) {
    ++rx_dropped_;
    warn("rx frame dropped: receiver not armed");
    return;
  }
  // Skip descriptors already handed to software, then confirm the hardware
  // owns enough capacity for the whole frame before touching memory.
  std::uint32_t start = rx_head_;
  std::size_t walk = 0;
  while (start != 0 && walk++ < kMaxDescriptorWalk) {
    DmaDescriptor d = read_descriptor(*ram_, start);
    if (d.owner_hw) break;
    start = d.next;
  }
  std::size_t room = 0;
  std::uint32_t probe = start;
  while (probe != 0 && room < frame.size() && walk++ < kMaxDescriptorWalk) {
    DmaDescriptor d = read_descriptor(*ram_, probe);
    if (!d.owner_hw) break;
    room += d.capacity;
    probe = d.next;
  }
  if (walk >= kMaxDescriptorWalk) {
    throw AccessFault("RX descriptor list too long or cyclic", rx_head_);
  }
  if (start == 0 || room < frame.size()) {
    ++rx_dropped_;
    warn("rx frame dropped: descriptor list exhausted");
    return;
  }
  std::size_t offset = 0;
  std::uint32_t cur = start;
  while (offset < frame.size()) {
    DmaDescriptor d = read_descriptor(*ram_, cur);
    std::size_t take = std::min<std::size_t>(d.capacity, frame.size() - offset);
    for (std::size_t i = 0; i < take; ++i) {
      ram_->write8(d.buffer + static_cast<std::uint32_t>(i), frame[offset + i]);
    }
    offset += take;
    d.filled = static_cast<std::uint16_t>(take);
    d.eof = offset == frame.size();
    d.owner_hw = false;
    write_descriptor(*ram_, d);
    cur = d.next;
  }
  rx_head_ = cur;
  ++rx_delivered_;
  raise_irq(kIrqRxDone, nullptr);
}

void Peripheral::process_due(std::uint64_t until_ps) {
  while (!events_.empty() && events_.top().time_ps <= until_ps) {
    Event ev = events_.top();
    events_.pop();
    now_ps_ = ev.time_ps;
    switch (ev.kind) {
      case Event::radio_window_close: {
        fire_op("tx_done", nullptr);
        DmaDescriptor d = read_descriptor(*ram_, static_cast<std::uint32_t>(ev.payload));
        d.owner_hw = false;  // hardware is finished with the buffer
        write_descriptor(*ram_, d);
        break;
      }
      case Event::ack_irq:
        raise_irq(kIrqTxDone, nullptr);
        break;
      case Event::timeout_irq:
        raise_irq(kIrqTxTimeout, nullptr);
        break;
      case Event::rx_inject:
        deliver_rx(script_.rx[ev.payload].frame);
        break;
    }
  }
}

void Peripheral::advance_ps(std::uint64_t delta_ps) {
  std::uint64_t target = now_ps_ + delta_ps;
  process_due(target);
  now_ps_ = target;
}

void Peripheral::advance_ns(std::uint64_t delta_ns) { advance_ps(delta_ns * kPsPerNs); }

void Peripheral::advance_cycles(std::uint64_t cycles) { advance_ps(cycles * kPsPerCycle); }

}  // namespace wcat
