#include "wcat/fixtures.hpp"

#include <cstdio>

#include "wcat/device.hpp"
#include "wcat/driver.hpp"
#include "wcat/twins.hpp"

namespace wcat {

namespace {

std::string hex_bytes(const std::vector<std::uint8_t>& bytes) {
  std::string out;
  for (std::uint8_t b : bytes) {
    char buf[4];
    std::snprintf(buf, sizeof buf, "%02x", b);
    out += buf;
  }
  return out;
}

std::string burst_script() {
  std::string out =
      "# Four well-formed data frames arriving back to back, ACKs at 100 us.\n"
      "ack_latency_ns 100000\n";
  MacAddr bssid = {0x02, 0x5a, 0x1b, 0x00, 0x00, 0x01};
  std::size_t payload_sizes[4] = {10, 100, 700, 1500};
  for (int i = 0; i < 4; ++i) {
    Frame8023 eth;
    eth.dst = {0x11, 0x22, 0x33, 0x44, 0x55, static_cast<std::uint8_t>(i)};
    eth.src = {0x0a, 0x0b, 0x0c, 0x0d, 0x0e, 0x0f};
    eth.ethertype = 0x0800;
    eth.payload.assign(payload_sizes[i], static_cast<std::uint8_t>(0x20 + i));
    out += "rx " + std::to_string(20000 + 20000 * i) + " " +
           hex_bytes(to_bytes(mac_encapsulate(eth, bssid))) + "\n";
  }
  return out;
}

}  // namespace

std::map<std::string, std::string> fixture_files() {
  std::map<std::string, std::string> files;

  files["esp32c3.devgraph"] = serialize_device_model(default_esp32c3_model());

  int index = 0;
  for (const TwinEntry& e : driver_twins()) {
    char prefix[8];
    std::snprintf(prefix, sizeof prefix, "%02d", ++index);
    files["functions/" + std::string(prefix) + "_" + e.name + ".wcir"] = serialize_wcir(e.build());
  }
  files["tx_task.wcir"] = serialize_wcir(twin_tx_task());
  files["tx_task_standby_wait.wcir"] = serialize_wcir(twin_tx_task_standby_wait());

  files["scripts/default.script"] =
      "# Worst admissible channel: the ACK arrives exactly at the protocol bound.\n"
      "ack_latency_ns 326000\n";
  files["scripts/fast_ack.script"] =
      "# Friendly channel: the ACK arrives after 50 us.\n"
      "ack_latency_ns 50000\n";
  files["scripts/dropped.script"] =
      "# The first transmission is never acknowledged and times out.\n"
      "ack_latency_ns 326000\n"
      "drop 1\n";
  files["scripts/burst.script"] = burst_script();

  files["harvest/steady_1mw.harvest"] =
      "# Sustained 1 mW input.\n"
      "harvest 0 1000\n";
  files["harvest/trickle_10uw.harvest"] =
      "# A slow 10 uW trickle.\n"
      "harvest 0 10\n";

  files["lifecycle/demo.config"] =
      "# Reactive intermittent demo: an empty 100 uF buffer, sustained 1 mW\n"
      "# harvest, and the transmission task dispatched whenever its analyzed\n"
      "# bound fits the stored energy.\n"
      "capacitor 0.0001 2.8 2.8 3.3\n"
      "horizon_ns 500000000\n"
      "txn tx_task\n"
      "harvest 0 1000\n";

  return files;
}

}  // namespace wcat
