#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "wcat/state_analysis.hpp"

using namespace wcat;

namespace {

WcirProgram load(const std::string& text) { return load_program(text); }

}  // namespace

TEST_CASE("straight-line transmit sequence is costed at the occupied maxima") {
  // power up, start a transmission, finish it, power down: the regions the
  // blocks pass through decide the cost, not just the entry state.
  WcirProgram p = load(
      "program line\n"
      "block up cycles=10 ops=wifi_power_up\n"
      "block start cycles=10 ops=tx_start\n"
      "block done cycles=10 ops=tx_done\n"
      "block down cycles=10 ops=wifi_power_down\n"
      "edge up start\nedge start done\nedge done down\n"
      "entry up\nexit down\n");
  DeviceGraph g = default_esp32c3_model().graph;
  StateMap sm = analyze_states(p, g, g.initial);
  CHECK(sm.at("up").cost_state == "Standby");
  CHECK(sm.at("start").cost_state == "Transmitting");
  CHECK(sm.at("done").cost_state == "Transmitting");
  CHECK(sm.at("down").cost_state == "Standby");
  CHECK(sm.at("up").entry == std::set<std::string>{"Sleep"});
  CHECK(sm.at("down").exit == std::set<std::string>{"Sleep"});
}

TEST_CASE("programs without device ops stay in the initial state") {
  WcirProgram p = load(
      "program plain\nblock a cycles=5\nblock b cycles=5\nedge a b\nentry a\nexit b\n");
  DeviceGraph g = default_esp32c3_model().graph;
  StateMap sm = analyze_states(p, g, "Sleep");
  for (const auto& b : p.blocks) {
    CHECK(sm.at(b.id).cost_state == "Sleep");
    CHECK(sm.at(b.id).entry == std::set<std::string>{"Sleep"});
  }
}

TEST_CASE("joins take the union and cost at the highest power") {
  WcirProgram p = load(
      "program dia\n"
      "block top cycles=1\n"
      "block hot cycles=1 ops=wifi_power_up\n"
      "block cold cycles=1\n"
      "block join cycles=1\n"
      "edge top hot\nedge top cold\nedge hot join\nedge cold join\n"
      "entry top\nexit join\n");
  DeviceGraph g = default_esp32c3_model().graph;
  StateMap sm = analyze_states(p, g, "Sleep");
  CHECK(sm.at("join").entry == std::set<std::string>{"Sleep", "Standby"});
  CHECK(sm.at("join").cost_state == "Standby");
}

TEST_CASE("entry_states overrides join the initial state") {
  WcirProgram p = load(
      "program solo\nblock f cycles=9 ops=tx_start\nentry f\nexit f\n"
      "entry_states Standby\n");
  DeviceGraph g = default_esp32c3_model().graph;
  StateMap sm = analyze_states(p, g, "Sleep");
  CHECK(sm.at("f").entry == std::set<std::string>{"Sleep", "Standby"});
  // tx_start from Standby reaches Transmitting; from Sleep it is inert.
  CHECK(sm.at("f").exit == std::set<std::string>{"Sleep", "Transmitting"});
  CHECK(sm.at("f").cost_state == "Transmitting");
  CHECK_THROWS_AS(analyze_states(p, g, "NoSuchState"), std::runtime_error);
}

TEST_CASE("loops reach their fixpoint") {
  // The loop body powers the peripheral up; after one trip around, the
  // header must also account for Standby.
  WcirProgram p = load(
      "program fix\n"
      "block pre cycles=1\n"
      "block hdr cycles=1\n"
      "block body cycles=1 ops=wifi_power_up\n"
      "block post cycles=1\n"
      "edge pre hdr\nedge hdr body\nedge body hdr\nedge hdr post\n"
      "entry pre\nexit post\nloopbound hdr 3 origin=driver\n");
  DeviceGraph g = default_esp32c3_model().graph;
  StateMap sm = analyze_states(p, g, "Sleep");
  CHECK(sm.at("hdr").entry == std::set<std::string>{"Sleep", "Standby"});
  CHECK(sm.at("hdr").cost_state == "Standby");
  CHECK(sm.at("post").cost_state == "Standby");
  CHECK(sm.at("pre").cost_state == "Sleep");
}

TEST_CASE("multi-op blocks occupy every intermediate state") {
  WcirProgram p = load(
      "program burst\n"
      "block all cycles=100 ops=wifi_power_up,tx_start,tx_done,wifi_power_down\n"
      "entry all\nexit all\n");
  DeviceGraph g = default_esp32c3_model().graph;
  StateMap sm = analyze_states(p, g, "Sleep");
  CHECK(sm.at("all").occupied ==
        std::set<std::string>{"Sleep", "Standby", "Transmitting"});
  CHECK(sm.at("all").cost_state == "Transmitting");
  CHECK(sm.at("all").exit == std::set<std::string>{"Sleep"});
}

TEST_CASE("adding an edge never shrinks a state set") {
  const char* base =
      "program mono\n"
      "block a cycles=1 ops=wifi_power_up\n"
      "block b cycles=1\n"
      "block c cycles=1\n"
      "edge a b\nedge b c\n"
      "entry a\nexit c\n";
  WcirProgram p = load(base);
  WcirProgram q = load(std::string(base) + "edge a c\n");
  // Re-serialize order differs; validate q manually instead of reloading.
  DeviceGraph g = default_esp32c3_model().graph;
  StateMap sp = analyze_states(p, g, "Sleep");
  StateMap sq = analyze_states(q, g, "Sleep");
  for (const auto& b : p.blocks) {
    const auto& before = sp.at(b.id).entry;
    const auto& after = sq.at(b.id).entry;
    CHECK(std::includes(after.begin(), after.end(), before.begin(), before.end()));
  }
}
