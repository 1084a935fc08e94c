#include "wcat/energy_trace.hpp"

#include <stdexcept>
#include <utility>

#include "wcat/driver.hpp"
#include "wcat/twins.hpp"

namespace wcat {

namespace {

constexpr std::uint64_t kPsPerSecond = 1000000000000ULL;

std::string ns_decimal(std::uint64_t ps) {
  Rat q = rat_from_u64(ps) / rat(1000);
  return to_exact_decimal(q);
}

}  // namespace

std::uint64_t EnergyTrace::duration_ps() const {
  if (segments.empty()) return 0;
  return segments.back().end_ps - segments.front().start_ps;
}

EnergyTrace make_trace(std::vector<TraceSegment> segments, const DeviceModel& model) {
  // Validate the raw list before normalizing.
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const TraceSegment& s = segments[i];
    if (s.end_ps < s.start_ps) throw std::invalid_argument("trace segment ends before it starts");
    if (i > 0 && s.start_ps != segments[i - 1].end_ps)
      throw std::invalid_argument("trace segments are not contiguous");
    if (model.graph.find_state(s.state) == nullptr)
      throw std::invalid_argument("trace segment in unknown device state '" + s.state + "'");
  }

  EnergyTrace t;
  for (TraceSegment& s : segments) {
    if (s.end_ps == s.start_ps) continue;  // instantaneous, carries no energy
    if (!t.segments.empty() && t.segments.back().state == s.state)
      t.segments.back().end_ps = s.end_ps;  // merge same-state neighbours
    else
      t.segments.push_back(std::move(s));
  }

  for (const TraceSegment& s : t.segments) {
    Rat seconds = rat_from_u64(s.end_ps - s.start_ps) / rat_from_u64(kPsPerSecond);
    Rat joules = energy_rate(model.graph, model.platform, s.state) * seconds;
    t.per_state_energy[s.state] += joules;
    t.total_energy += joules;
  }
  std::uint64_t dur = t.duration_ps();
  t.total_cycles = (dur + kPsPerCycle - 1) / kPsPerCycle;
  return t;
}

EnergyTrace concat_traces(const EnergyTrace& a, const EnergyTrace& b, const DeviceModel& model) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  if (b.segments.front().start_ps != a.segments.back().end_ps)
    throw std::invalid_argument("concatenated trace does not start where the first ends");
  std::vector<TraceSegment> all = a.segments;
  all.insert(all.end(), b.segments.begin(), b.segments.end());
  return make_trace(std::move(all), model);
}

BoundVerdict check_bound(const EnergyTrace& trace, const Rat& bound_joules) {
  BoundVerdict v;
  v.slack = bound_joules - trace.total_energy;
  v.pass = trace.total_energy <= bound_joules;
  return v;
}

std::string export_trace(const EnergyTrace& trace) {
  std::string out;
  for (const TraceSegment& s : trace.segments) {
    out += "segment " + ns_decimal(s.start_ps) + " " + ns_decimal(s.end_ps) + " " + s.state + "\n";
  }
  out += "cycles " + std::to_string(trace.total_cycles) + "\n";
  for (const auto& [state, joules] : trace.per_state_energy) {
    out += "energy " + state + " " + to_exact_decimal(joules) + "\n";
  }
  out += "total_energy " + to_exact_decimal(trace.total_energy) + "\n";
  return out;
}

EnergyTracer::EnergyTracer(Peripheral& periph, const DeviceModel& model)
    : periph_(periph), model_(model) {
  periph_.set_state_listener(&EnergyTracer::on_change, this);
}

EnergyTracer::~EnergyTracer() { periph_.set_state_listener(nullptr, nullptr); }

void EnergyTracer::begin() {
  active_ = true;
  segments_.clear();
  seg_start_ps_ = periph_.now_ps();
  seg_state_ = periph_.device_state();
}

EnergyTrace EnergyTracer::end() {
  if (!active_) return {};
  active_ = false;
  segments_.push_back({seg_start_ps_, periph_.now_ps(), seg_state_});
  return make_trace(std::move(segments_), model_);
}

void EnergyTracer::on_change(void* user, std::uint64_t time_ps, const std::string& state) {
  auto* self = static_cast<EnergyTracer*>(user);
  if (!self->active_) return;
  self->segments_.push_back({self->seg_start_ps_, time_ps, self->seg_state_});
  self->seg_start_ps_ = time_ps;
  self->seg_state_ = state;
}

// ---------------------------------------------------------------------------
// Bundled scenarios
// ---------------------------------------------------------------------------

namespace {

constexpr std::uint64_t kIdleCycles = 160000;  // one millisecond at 160 MHz

// Everything a scenario run needs, with construction order fixing lifetimes.
struct ScenarioRig {
  DeviceModel model = default_esp32c3_model();
  SimRam ram;
  Peripheral periph;
  DriverContext ctx;
  EnergyTracer tracer;

  explicit ScenarioRig(const ChannelScript& script)
      : periph(model.graph, script, &ram),
        ctx(make_context(&periph, &ram)),
        tracer(periph, model) {
    ctx.bssid = {0x02, 0x5a, 0x1b, 0x00, 0x00, 0x01};
  }
};

Frame8023 canonical_frame() {
  Frame8023 f;
  f.dst = {0x11, 0x22, 0x33, 0x44, 0x55, 0x66};
  f.src = {0x0a, 0x0b, 0x0c, 0x0d, 0x0e, 0x0f};
  f.ethertype = 0x0800;
  f.payload.assign(64, 0x42);
  return f;
}

// --- twins for the composite scenarios ------------------------------------

WcirProgram classify(WcirProgram p) {
  classify_edges(p);
  return p;
}

WcirProgram twin_idle_1ms() {
  WcirProgram p;
  p.name = "idle_1ms";
  p.blocks.push_back({"idle", kIdleCycles, {}, "", 0});
  p.entry = "idle";
  p.exits = {"idle"};
  p.entry_states = {"Sleep"};
  return classify(std::move(p));
}

WcirProgram twin_bring_up() {
  WcirProgram p;
  p.name = "bring_up";
  p.blocks.push_back({"init", costs::hw_init::total, {"wifi_power_up"}, "", 0});
  p.blocks.push_back({"irq", costs::setup_interrupt::total, {}, "", 0});
  p.blocks.push_back({"rx", costs::setup_rx::total, {}, "", 0});
  p.edges.push_back({"init", "irq", EdgeKind::forward, 0});
  p.edges.push_back({"irq", "rx", EdgeKind::forward, 0});
  p.entry = "init";
  p.exits = {"rx"};
  // No entry-state override: the module starts from the device's initial
  // Sleep state, exactly like the hardware after reset.
  return classify(std::move(p));
}

WcirProgram twin_rx_burst() {
  WcirProgram p;
  p.name = "rx_burst";
  p.blocks.push_back({"handle", costs::handle_rx::total, {}, "", 0});
  p.blocks.push_back({"drain", 0, {}, "", 0});
  p.blocks.push_back({"frame", costs::mac_handle_rx::total, {}, "", 0});
  p.blocks.push_back({"leave", 0, {}, "", 0});
  p.edges.push_back({"handle", "drain", EdgeKind::forward, 0});
  p.edges.push_back({"drain", "frame", EdgeKind::forward, 0});
  p.edges.push_back({"frame", "drain", EdgeKind::forward, 0});
  p.edges.push_back({"drain", "leave", EdgeKind::forward, 0});
  p.annotations.push_back({"drain", costs::kRxPoolSize, BoundOrigin::driver, 0});
  p.entry = "handle";
  p.exits = {"leave"};
  p.entry_states = {"Standby"};
  return classify(std::move(p));
}

// --- runs ------------------------------------------------------------------

EnergyTrace run_idle_1ms(const ChannelScript& script) {
  ScenarioRig rig(script);
  rig.tracer.begin();
  rig.periph.advance_cycles(kIdleCycles);
  return rig.tracer.end();
}

EnergyTrace run_bring_up(const ChannelScript& script) {
  ScenarioRig rig(script);
  rig.tracer.begin();
  wifi_hw_init(rig.ctx);
  wifi_setup_interrupt(rig.ctx);
  wifi_setup_rx(rig.ctx);
  return rig.tracer.end();
}

EnergyTrace run_tx_task(const ChannelScript& script) {
  ScenarioRig rig(script);
  wifi_hw_init(rig.ctx);  // untraced setup: the task starts from Standby
  rig.tracer.begin();
  tx_task_run(rig.ctx, canonical_frame());
  return rig.tracer.end();
}

EnergyTrace run_rx_burst(const ChannelScript& script) {
  ScenarioRig rig(script);
  wifi_hw_init(rig.ctx);
  wifi_setup_interrupt(rig.ctx);
  wifi_setup_rx(rig.ctx);
  // Let every scripted frame land before the measured drain begins.
  std::uint64_t last_ns = 0;
  for (const auto& rx : script.rx)
    if (rx.time_ns > last_ns) last_ns = rx.time_ns;
  rig.periph.advance_ns(last_ns + 1);

  rig.tracer.begin();
  wifi_handle_rx(rig.ctx);
  while (true) {
    try {
      if (!mac_task_step(rig.ctx).has_value()) break;
    } catch (const DriverError&) {
      // A frame the MAC layer rejects is dropped; the drain continues.
    }
  }
  return rig.tracer.end();
}

}  // namespace

const std::vector<Scenario>& scenarios() {
  static const std::vector<Scenario> kScenarios = {
      {"idle_1ms", "one millisecond of idle time in the module's initial state", &twin_idle_1ms,
       &run_idle_1ms},
      {"bring_up", "power-up, interrupt wiring and reception setup", &twin_bring_up,
       &run_bring_up},
      {"tx_task", "power-gated transmission task: transmit, sleep across the wait, process",
       &twin_tx_task, &run_tx_task},
      {"rx_burst", "drain a burst of received frames through the MAC layer", &twin_rx_burst,
       &run_rx_burst},
  };
  return kScenarios;
}

const Scenario* find_scenario(const std::string& name) {
  for (const Scenario& s : scenarios())
    if (s.name == name) return &s;
  return nullptr;
}

}  // namespace wcat
