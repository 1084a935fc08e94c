#include "wcat/intermittent.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "wcat/ipet.hpp"
#include "wcat/state_analysis.hpp"

namespace wcat {

namespace {

constexpr std::uint64_t kNsPerSecond = 1000000000ULL;

void check_capacitor(const Capacitor& cap) {
  if (cap.capacitance <= 0) throw std::invalid_argument("capacitance must be positive");
  if (cap.v_min <= 0) throw std::invalid_argument("brown-out threshold must be positive");
  if (cap.v_now < cap.v_min || cap.v_now > cap.v_max || cap.v_min > cap.v_max)
    throw std::invalid_argument("capacitor voltage outside [v_min, v_max]");
}

Rat half_c_delta_vsq(const Capacitor& cap, const Rat& v_hi) {
  Rat e = cap.capacitance * (v_hi * v_hi - cap.v_min * cap.v_min) / rat(2);
  return e;
}

Rat seconds_from_ns(std::uint64_t ns) {
  Rat s = rat_from_u64(ns) / rat_from_u64(kNsPerSecond);
  return s;
}

std::uint64_t ceil_ps_to_ns(std::uint64_t ps) { return (ps + 999) / 1000; }

// Banks `power * dt` into `stored`, clamped to the capacitor's capacity.
void bank(Rat& stored, const Rat& cap_energy, const Rat& power_watts, std::uint64_t dt_ns) {
  if (dt_ns == 0 || power_watts == 0) return;
  stored += power_watts * seconds_from_ns(dt_ns);
  if (stored > cap_energy) stored = cap_energy;
}

// Charges from `now` until `stored` first reaches `need` (or the horizon,
// whichever is earlier). Returns the new time; `stored` is updated in place.
std::uint64_t advance_until(const HarvestTrace& harvest, Rat& stored, const Rat& cap_energy,
                            const Rat& need, std::uint64_t now, std::uint64_t horizon_ns) {
  const std::vector<HarvestPoint>& pts = harvest.points;
  std::size_t k = 0;  // first point strictly after `now`
  while (k < pts.size() && pts[k].time_ns <= now) ++k;

  while (now < horizon_ns) {
    if (stored >= need) return now;
    Rat power = (k == 0) ? rat(0) : pts[k - 1].power_watts;
    std::uint64_t step_end = (k < pts.size() && pts[k].time_ns < horizon_ns) ? pts[k].time_ns
                                                                             : horizon_ns;
    if (power > 0 && cap_energy >= need) {
      Rat deficit = need - stored;
      Rat dt_ns_exact = deficit / power * rat_from_u64(kNsPerSecond);
      Rat span = rat_from_u64(step_end - now);
      if (dt_ns_exact <= span) {
        Rat dt_ceil = rat_ceil(dt_ns_exact);
        std::uint64_t dt = static_cast<std::uint64_t>(dt_ceil.get_num().get_ui());
        bank(stored, cap_energy, power, dt);
        return now + dt;
      }
    }
    bank(stored, cap_energy, power, step_end - now);
    now = step_end;
    if (k < pts.size() && pts[k].time_ns == now) ++k;
  }
  return now;
}

}  // namespace

Capacitor Capacitor::standard() {
  Capacitor c;
  c.capacitance = rat(1, 10000);  // 100 uF
  c.v_now = rat(33, 10);
  c.v_min = rat(28, 10);
  c.v_max = rat(33, 10);
  return c;
}

Rat available_energy(const Capacitor& cap) {
  check_capacitor(cap);
  return half_c_delta_vsq(cap, cap.v_now);
}

Rat capacity_energy(const Capacitor& cap) {
  check_capacitor(cap);
  return half_c_delta_vsq(cap, cap.v_max);
}

Transaction make_transaction(const Scenario& scenario, const ChannelScript& script) {
  DeviceModel m = default_esp32c3_model();
  WcirProgram twin = scenario.twin();
  StateMap states = analyze_states(twin, m.graph, m.graph.initial);

  Transaction txn;
  txn.scenario = scenario.name;
  Rat bounds[2];
  Objective objectives[2] = {Objective::wcec_device_aware, Objective::wcet_cycles};
  for (int i = 0; i < 2; ++i) {
    IlpProblem ilp = build_ilp(twin, &states, m.graph, m.platform, objectives[i]);
    IlpSolution sol = solve(ilp);
    if (sol.status != IlpStatus::optimal || !check_certificate(ilp, sol))
      throw std::runtime_error("uncertified analysis for scenario " + scenario.name);
    bounds[i] = sol.objective_value;
  }
  txn.wcec = bounds[0];
  txn.wcet_seconds = bounds[1] * cycle_seconds(m.platform);
  txn.trace = scenario.run(script);
  return txn;
}

Decision dispatch(const Capacitor& cap, const Transaction& txn) {
  if (txn.wcec <= 0) throw std::invalid_argument("transaction bound must be positive");
  return txn.wcec <= available_energy(cap) ? Decision::run : Decision::wait;
}

HarvestTrace parse_harvest_trace(const std::string& text) {
  HarvestTrace out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw std::runtime_error("harvest trace line " + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    std::string::size_type hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream tok(line);
    std::string word;
    if (!(tok >> word)) continue;
    if (word != "harvest") fail("unknown directive '" + word + "'");
    std::uint64_t time_ns = 0;
    std::string uw;
    if (!(tok >> time_ns >> uw)) fail("expected: harvest <time_ns> <microwatts>");
    std::string extra;
    if (tok >> extra) fail("trailing token '" + extra + "'");
    Rat microwatts;
    try {
      microwatts = parse_decimal(uw);
    } catch (const std::exception& e) {
      fail(e.what());
    }
    if (microwatts < 0) fail("negative harvest power");
    if (!out.points.empty() && time_ns <= out.points.back().time_ns)
      fail("times must be strictly increasing");
    Rat watts = microwatts / rat(1000000);
    out.points.push_back({time_ns, watts});
  }
  return out;
}

HarvestTrace load_harvest_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open harvest trace: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_harvest_trace(buf.str());
}

std::string serialize_harvest_trace(const HarvestTrace& trace) {
  std::string out;
  for (const HarvestPoint& p : trace.points) {
    Rat microwatts = p.power_watts * rat(1000000);
    out += "harvest " + std::to_string(p.time_ns) + " " + to_exact_decimal(microwatts) + "\n";
  }
  return out;
}

std::string LifecycleReport::render() const {
  auto uj = [](const Rat& joules) -> std::string {
    Rat scaled = joules * rat(1000000);
    return format_sig(scaled, 6);
  };
  std::string out;
  for (const LifecycleEvent& e : events) {
    switch (e.kind) {
      case LifecycleEvent::Kind::dispatch:
        out += "dispatch";
        break;
      case LifecycleEvent::Kind::complete:
        out += "complete";
        break;
      case LifecycleEvent::Kind::wait:
        out += "wait";
        break;
      case LifecycleEvent::Kind::brown_out:
        out += "brownout";
        break;
    }
    out += " " + std::to_string(e.time_ns) + " " + e.txn + " stored_uJ=" + uj(e.stored) + "\n";
  }
  out += "summary completions=" + std::to_string(completions) +
         " waits=" + std::to_string(waits) + " brownouts=" + std::to_string(brown_outs) +
         " end_ns=" + std::to_string(end_ns) + " final_stored_uJ=" + uj(final_stored) + "\n";
  return out;
}

LifecycleReport simulate_lifecycle(const Capacitor& cap, const std::vector<Transaction>& txns,
                                   const HarvestTrace& harvest, std::uint64_t horizon_ns) {
  // Instantaneous drain rates come from the same model the analyzer and the
  // bundled scenarios use; traces in other states were rejected upstream.
  DeviceModel model = default_esp32c3_model();
  Rat stored = available_energy(cap);
  Rat cap_energy = capacity_energy(cap);

  LifecycleReport rep;
  std::uint64_t now = 0;
  if (txns.empty()) {
    // Nothing to run: charge to the horizon. `cap_energy + 1` is
    // unreachable, so advance_until banks everything the trace offers.
    Rat unreachable = cap_energy + rat(1);
    now = advance_until(harvest, stored, cap_energy, unreachable, now, horizon_ns);
    rep.final_stored = stored;
    rep.end_ns = now;
    return rep;
  }

  std::size_t next = 0;
  while (now < horizon_ns) {
    const Transaction& txn = txns[next % txns.size()];
    if (txn.wcec <= 0) throw std::invalid_argument("transaction bound must be positive");
    if (stored >= txn.wcec) {
      rep.events.push_back({LifecycleEvent::Kind::dispatch, now, txn.scenario, stored});
      bool browned = false;
      std::uint64_t elapsed_ps = 0;
      for (const TraceSegment& seg : txn.trace.segments) {
        Rat rate = energy_rate(model.graph, model.platform, seg.state);
        std::uint64_t seg_ps = seg.end_ps - seg.start_ps;
        Rat drain = rate * (rat_from_u64(seg_ps) / rat_from_u64(kNsPerSecond * 1000));
        if (drain > stored) {
          // The supply hits the brown-out floor inside this segment.
          Rat frac_ps = stored / rate * rat_from_u64(kNsPerSecond * 1000);
          elapsed_ps += static_cast<std::uint64_t>(rat_ceil(frac_ps).get_num().get_ui());
          stored = rat(0);
          browned = true;
          break;
        }
        stored -= drain;
        elapsed_ps += seg_ps;
      }
      std::uint64_t step_ns = ceil_ps_to_ns(elapsed_ps);
      now += (step_ns == 0) ? 1 : step_ns;  // a degenerate run still moves time
      if (browned) {
        ++rep.brown_outs;
        rep.events.push_back({LifecycleEvent::Kind::brown_out, now, txn.scenario, stored});
      } else {
        ++rep.completions;
        rep.events.push_back({LifecycleEvent::Kind::complete, now, txn.scenario, stored});
        ++next;
      }
    } else {
      ++rep.waits;
      rep.events.push_back({LifecycleEvent::Kind::wait, now, txn.scenario, stored});
      now = advance_until(harvest, stored, cap_energy, txn.wcec, now, horizon_ns);
    }
  }
  rep.final_stored = stored;
  rep.end_ns = now;
  return rep;
}

}  // namespace wcat
