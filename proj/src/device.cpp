#include "wcat/device.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "wcat/program.hpp"  // ParseError

namespace wcat {

const DeviceState* DeviceGraph::find_state(const std::string& id) const {
  for (const auto& s : states)
    if (s.id == id) return &s;
  return nullptr;
}

bool DeviceGraph::has_op(const std::string& op) const {
  for (const auto& t : transitions)
    if (t.op == op) return true;
  return false;
}

DeviceModel default_esp32c3_model() {
  DeviceModel m;
  m.graph.states = {
      {"Sleep", rat(0)},
      {"Standby", rat(87)},
      {"Transmitting", rat(285)},
  };
  m.graph.transitions = {
      {"Sleep", "wifi_power_up", "Standby"},
      {"Standby", "wifi_power_down", "Sleep"},
      {"Standby", "tx_start", "Transmitting"},
      {"Transmitting", "tx_done", "Standby"},
  };
  m.graph.initial = "Sleep";
  m.platform.clock_hz = rat(160000000);
  m.platform.supply_volts = rat(33, 10);
  m.platform.cpu_current_ma = rat(28);
  return m;
}

std::string step(const DeviceGraph& graph, const std::string& state, const std::string& op,
                 bool* inert) {
  if (!graph.find_state(state)) throw std::runtime_error("unknown device state '" + state + "'");
  for (const auto& t : graph.transitions) {
    if (t.from == state && t.op == op) {
      if (inert) *inert = false;
      return t.to;
    }
  }
  if (inert) *inert = true;
  return state;
}

Rat energy_rate(const DeviceGraph& graph, const PlatformModel& platform,
                const std::string& state) {
  Rat draw_ma;
  if (state == kAlwaysOn) {
    if (graph.states.empty()) throw std::runtime_error("device graph has no states");
    draw_ma = graph.states.front().current_ma;
    for (const auto& s : graph.states)
      if (s.current_ma > draw_ma) draw_ma = s.current_ma;
  } else {
    const DeviceState* s = graph.find_state(state);
    if (!s) throw std::runtime_error("unknown device state '" + state + "'");
    draw_ma = s->current_ma;
  }
  // mA * V = mW; scale to watts.
  return platform.supply_volts * (platform.cpu_current_ma + draw_ma) / rat(1000);
}

Rat energy_per_cycle(const DeviceGraph& graph, const PlatformModel& platform,
                     const std::string& state) {
  return energy_rate(graph, platform, state) / platform.clock_hz;
}

Rat cycle_seconds(const PlatformModel& platform) { return rat(1) / platform.clock_hz; }

namespace {

// Minimal key=value splitter shared with nothing else; the device format is
// small enough that reusing the WCIR tokenizer would be more code than this.
std::vector<std::string> words(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string w;
  while (in >> w) {
    if (w[0] == '#') break;
    out.push_back(w);
  }
  return out;
}

Rat kv_decimal(const std::string& tok, const std::string& key, int line_no) {
  auto eq = tok.find('=');
  if (eq == std::string::npos || tok.substr(0, eq) != key)
    throw ParseError("expected " + key + "=<decimal>, got '" + tok + "'", line_no, 1);
  try {
    return parse_decimal(tok.substr(eq + 1));
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string(e.what()) + " in '" + tok + "'", line_no, 1);
  }
}

}  // namespace

DeviceModel parse_device_model(const std::string& text) {
  DeviceModel m;
  bool saw_initial = false, saw_platform = false;
  int line_no = 0;
  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string piece;
    std::istringstream parts(raw);
    while (std::getline(parts, piece, ';')) {
      auto toks = words(piece);
      if (toks.empty()) continue;
      const std::string& d = toks[0];
      if (d == "state") {
        if (toks.size() != 3) throw ParseError("usage: state <id> current_ma=<decimal>", line_no, 1);
        m.graph.states.push_back({toks[1], kv_decimal(toks[2], "current_ma", line_no)});
      } else if (d == "transition") {
        if (toks.size() != 4) throw ParseError("usage: transition <from> <op> <to>", line_no, 1);
        m.graph.transitions.push_back({toks[1], toks[2], toks[3]});
      } else if (d == "initial") {
        if (toks.size() != 2) throw ParseError("usage: initial <id>", line_no, 1);
        if (saw_initial) throw ParseError("duplicate initial directive", line_no, 1);
        m.graph.initial = toks[1];
        saw_initial = true;
      } else if (d == "platform") {
        if (toks.size() != 4)
          throw ParseError("usage: platform clock_hz=... volts=... cpu_ma=...", line_no, 1);
        if (saw_platform) throw ParseError("duplicate platform directive", line_no, 1);
        m.platform.clock_hz = kv_decimal(toks[1], "clock_hz", line_no);
        m.platform.supply_volts = kv_decimal(toks[2], "volts", line_no);
        m.platform.cpu_current_ma = kv_decimal(toks[3], "cpu_ma", line_no);
        saw_platform = true;
      } else {
        throw ParseError("unknown directive '" + d + "'", line_no, 1);
      }
    }
  }

  // Semantic checks.
  std::map<std::string, int> seen;
  for (const auto& s : m.graph.states) {
    if (++seen[s.id] > 1) throw std::runtime_error("duplicate device state '" + s.id + "'");
    if (s.id == kAlwaysOn)
      throw std::runtime_error("state id 'always_on' is reserved for the pseudo-state");
    if (s.current_ma < 0)
      throw std::runtime_error("negative current draw on state '" + s.id + "'");
  }
  std::map<std::pair<std::string, std::string>, int> arrows;
  for (const auto& t : m.graph.transitions) {
    if (!m.graph.find_state(t.from) || !m.graph.find_state(t.to))
      throw std::runtime_error("transition " + t.from + " -" + t.op + "-> " + t.to +
                               " references an unknown state");
    if (++arrows[{t.from, t.op}] > 1)
      throw std::runtime_error("nondeterministic op '" + t.op + "' from state '" + t.from + "'");
  }
  if (!saw_initial) throw std::runtime_error("missing initial directive");
  if (!m.graph.find_state(m.graph.initial))
    throw std::runtime_error("initial state '" + m.graph.initial + "' is undefined");
  if (!saw_platform) throw std::runtime_error("missing platform directive");
  if (m.platform.clock_hz <= 0 || m.platform.supply_volts <= 0 || m.platform.cpu_current_ma <= 0)
    throw std::runtime_error("platform constants must be strictly positive");
  return m;
}

DeviceModel load_device_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_device_model(ss.str());
  } catch (const ParseError& e) {
    throw std::runtime_error(path + ":" + std::to_string(e.line) + ": " + e.what());
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

std::string serialize_device_model(const DeviceModel& m) {
  std::ostringstream out;
  for (const auto& s : m.graph.states)
    out << "state " << s.id << " current_ma=" << to_exact_decimal(s.current_ma) << "\n";
  for (const auto& t : m.graph.transitions)
    out << "transition " << t.from << " " << t.op << " " << t.to << "\n";
  out << "initial " << m.graph.initial << "\n";
  out << "platform clock_hz=" << to_exact_decimal(m.platform.clock_hz)
      << " volts=" << to_exact_decimal(m.platform.supply_volts)
      << " cpu_ma=" << to_exact_decimal(m.platform.cpu_current_ma) << "\n";
  return out.str();
}

}  // namespace wcat
