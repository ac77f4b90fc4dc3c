#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aisolsr/ais.hpp"
#include "aisolsr/mobility.hpp"
#include "aisolsr/olsr.hpp"
#include "aisolsr/types.hpp"

namespace aisolsr {

enum class Protocol { olsr, ais_olsr };

const char* to_string(Protocol p);
Protocol parse_protocol(std::string_view text);

struct Flow {
  NodeId source;
  NodeId destination;

  friend bool operator==(const Flow&, const Flow&) = default;
};

/// Every knob of one simulation run. Defaults reproduce the 100-node,
/// 1000 m x 1000 m, 200 s, 10 J scenario.
struct ScenarioConfig {
  std::size_t node_count = 100;
  double area_width = 1000.0;
  double area_height = 1000.0;
  double sim_time = 200.0;
  double initial_energy = 10.0;
  double energy_floor = 0.5;
  double radio_range = 250.0;

  double hello_interval = 2.0;
  double tc_interval = 5.0;
  double neighbor_hold = 6.0;
  double topology_hold = 15.0;
  double timer_jitter = 0.1;  // fraction of the interval

  double speed_min = 1.0;
  double speed_max = 10.0;
  double pause_time = 10.0;
  double mobility_step = 0.5;

  std::size_t flow_count = 10;
  std::size_t packet_size = 512;  // bytes
  double packet_rate = 4.0;       // packets per second per flow
  double traffic_start = 10.0;

  std::size_t queue_limit = 50;
  double hop_latency = 0.002;
  double latency_jitter = 0.0005;
  std::size_t data_ttl = 64;

  double ctrl_tx_cost = 0.005;
  double ctrl_rx_cost = 0.0025;
  double data_tx_cost = 0.02;
  double data_rx_cost = 0.01;

  std::size_t detection_capacity = 4;
  std::size_t top_n = 3;
  double dominance_margin = 0.05;
  std::size_t max_candidates = 16;
  std::size_t extra_hops = 3;
  std::size_t memory_capacity = 64;
  std::size_t meta_replacement = 8;
  double memory_max_age = 10.0;  // two TC intervals

  double checkpoint_interval = 1.0;
  bool trace_control = true;

  Protocol protocol = Protocol::olsr;
  std::uint64_t seed = 1;

  std::vector<Position> positions;       // fixed placement; empty = uniform random
  std::vector<double> initial_energies;  // per node; empty = initial_energy everywhere
  std::vector<Flow> flows;               // explicit flows; empty = flow_count random pairs

  bool mobile() const { return speed_max > 0.0; }
  double initial_energy_of(NodeId n) const;
  double initial_max() const;

  MobilityParams mobility_params() const;
  OlsrParams olsr_params() const;
  AisParams ais_params() const;

  /// Throws ConfigError naming the first offending field.
  void validate() const;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Names of every schema key, in serialisation order.
const std::vector<std::string>& config_keys();
bool is_config_key(std::string_view key);
bool is_numeric_config_key(std::string_view key);

/// Assigns one key from its textual value. Throws ConfigError.
void set_config_value(ScenarioConfig& config, std::string_view key, std::string_view value);
std::string get_config_value(const ScenarioConfig& config, std::string_view key);

/// Flat `key = value` text, `#` comments. Unset keys keep their defaults.
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Full effective configuration, every key, round-trippable through parse_config.
std::string to_config_text(const ScenarioConfig& config);

/// Desk-scale preset: 20 nodes, 500 m x 500 m, 60 s.
ScenarioConfig desk_config();

/// Resolves a bundled preset name ("table2", "desk") or reads a file.
ScenarioConfig resolve_config(const std::string& name_or_path);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace aisolsr
