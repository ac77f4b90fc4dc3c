#include "aisolsr/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include "aisolsr/codec.hpp"

namespace aisolsr {

const char* to_string(Protocol p) { return p == Protocol::olsr ? "olsr" : "ais-olsr"; }

Protocol parse_protocol(std::string_view text) {
  if (text == "olsr") return Protocol::olsr;
  if (text == "ais-olsr" || text == "ais_olsr") return Protocol::ais_olsr;
  throw ConfigError("protocol", "expected 'olsr' or 'ais-olsr', got '" + std::string(text) + "'");
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    const auto at = s.find(sep);
    out.push_back(trim(s.substr(0, at)));
    if (at == std::string_view::npos) break;
    s.remove_prefix(at + 1);
  }
  return out;
}

double parse_real(std::string_view key, std::string_view text) {
  text = trim(text);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError(std::string(key), "expected a number, got '" + std::string(text) + "'");
  }
  return v;
}

std::uint64_t parse_unsigned(std::string_view key, std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '-') {
    throw ConfigError(std::string(key), "must be a non-negative integer, got '" + std::string(text) + "'");
  }
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError(std::string(key), "expected a non-negative integer, got '" + std::string(text) + "'");
  }
  return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
  text = trim(text);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(std::string(key), "expected true or false, got '" + std::string(text) + "'");
}

using Setter = void (*)(ScenarioConfig&, std::string_view key, std::string_view value);
using Getter = std::string (*)(const ScenarioConfig&);

struct KeySpec {
  std::string_view name;
  bool numeric;
  Setter set;
  Getter get;
};

template <auto Member>
KeySpec real_key(std::string_view name) {
  return {name, true, [](ScenarioConfig& c, std::string_view k, std::string_view v) { c.*Member = parse_real(k, v); },
          [](const ScenarioConfig& c) { return format_double(c.*Member); }};
}

template <auto Member>
KeySpec count_key(std::string_view name) {
  return {name, true,
          [](ScenarioConfig& c, std::string_view k, std::string_view v) {
            c.*Member = static_cast<std::size_t>(parse_unsigned(k, v));
          },
          [](const ScenarioConfig& c) { return std::to_string(c.*Member); }};
}

const std::vector<KeySpec>& key_specs() {
  static const std::vector<KeySpec> specs = {
      count_key<&ScenarioConfig::node_count>("node_count"),
      real_key<&ScenarioConfig::area_width>("area_width"),
      real_key<&ScenarioConfig::area_height>("area_height"),
      real_key<&ScenarioConfig::sim_time>("sim_time"),
      real_key<&ScenarioConfig::initial_energy>("initial_energy"),
      real_key<&ScenarioConfig::energy_floor>("energy_floor"),
      real_key<&ScenarioConfig::radio_range>("radio_range"),
      real_key<&ScenarioConfig::hello_interval>("hello_interval"),
      real_key<&ScenarioConfig::tc_interval>("tc_interval"),
      real_key<&ScenarioConfig::neighbor_hold>("neighbor_hold"),
      real_key<&ScenarioConfig::topology_hold>("topology_hold"),
      real_key<&ScenarioConfig::timer_jitter>("timer_jitter"),
      real_key<&ScenarioConfig::speed_min>("speed_min"),
      real_key<&ScenarioConfig::speed_max>("speed_max"),
      real_key<&ScenarioConfig::pause_time>("pause_time"),
      real_key<&ScenarioConfig::mobility_step>("mobility_step"),
      count_key<&ScenarioConfig::flow_count>("flow_count"),
      count_key<&ScenarioConfig::packet_size>("packet_size"),
      real_key<&ScenarioConfig::packet_rate>("packet_rate"),
      real_key<&ScenarioConfig::traffic_start>("traffic_start"),
      count_key<&ScenarioConfig::queue_limit>("queue_limit"),
      real_key<&ScenarioConfig::hop_latency>("hop_latency"),
      real_key<&ScenarioConfig::latency_jitter>("latency_jitter"),
      count_key<&ScenarioConfig::data_ttl>("data_ttl"),
      real_key<&ScenarioConfig::ctrl_tx_cost>("ctrl_tx_cost"),
      real_key<&ScenarioConfig::ctrl_rx_cost>("ctrl_rx_cost"),
      real_key<&ScenarioConfig::data_tx_cost>("data_tx_cost"),
      real_key<&ScenarioConfig::data_rx_cost>("data_rx_cost"),
      count_key<&ScenarioConfig::detection_capacity>("detection_capacity"),
      count_key<&ScenarioConfig::top_n>("top_n"),
      real_key<&ScenarioConfig::dominance_margin>("dominance_margin"),
      count_key<&ScenarioConfig::max_candidates>("max_candidates"),
      count_key<&ScenarioConfig::extra_hops>("extra_hops"),
      count_key<&ScenarioConfig::memory_capacity>("memory_capacity"),
      count_key<&ScenarioConfig::meta_replacement>("meta_replacement"),
      real_key<&ScenarioConfig::memory_max_age>("memory_max_age"),
      real_key<&ScenarioConfig::checkpoint_interval>("checkpoint_interval"),
      {"trace_control", false,
       [](ScenarioConfig& c, std::string_view k, std::string_view v) { c.trace_control = parse_bool(k, v); },
       [](const ScenarioConfig& c) { return std::string(c.trace_control ? "true" : "false"); }},
      {"protocol", false,
       [](ScenarioConfig& c, std::string_view, std::string_view v) { c.protocol = parse_protocol(trim(v)); },
       [](const ScenarioConfig& c) { return std::string(to_string(c.protocol)); }},
      {"seed", true, [](ScenarioConfig& c, std::string_view k, std::string_view v) { c.seed = parse_unsigned(k, v); },
       [](const ScenarioConfig& c) { return std::to_string(c.seed); }},
      {"positions", false,
       [](ScenarioConfig& c, std::string_view k, std::string_view v) {
         c.positions.clear();
         if (trim(v).empty()) return;
         for (auto item : split(v, ',')) {
           const auto xy = split(item, ':');
           if (xy.size() != 2) throw ConfigError(std::string(k), "expected x:y pairs, got '" + std::string(item) + "'");
           c.positions.push_back({parse_real(k, xy[0]), parse_real(k, xy[1])});
         }
       },
       [](const ScenarioConfig& c) {
         std::string out;
         for (std::size_t i = 0; i < c.positions.size(); ++i) {
           if (i) out += ", ";
           out += format_double(c.positions[i].x) + ":" + format_double(c.positions[i].y);
         }
         return out;
       }},
      {"initial_energies", false,
       [](ScenarioConfig& c, std::string_view k, std::string_view v) {
         c.initial_energies.clear();
         if (trim(v).empty()) return;
         for (auto item : split(v, ',')) c.initial_energies.push_back(parse_real(k, item));
       },
       [](const ScenarioConfig& c) {
         std::string out;
         for (std::size_t i = 0; i < c.initial_energies.size(); ++i) {
           if (i) out += ", ";
           out += format_double(c.initial_energies[i]);
         }
         return out;
       }},
      {"flows", false,
       [](ScenarioConfig& c, std::string_view k, std::string_view v) {
         c.flows.clear();
         if (trim(v).empty()) return;
         for (auto item : split(v, ',')) {
           const auto ends = split(item, '>');
           if (ends.size() != 2) throw ConfigError(std::string(k), "expected src>dst pairs, got '" + std::string(item) + "'");
           c.flows.push_back({NodeId(static_cast<std::uint32_t>(parse_unsigned(k, ends[0]))),
                              NodeId(static_cast<std::uint32_t>(parse_unsigned(k, ends[1])))});
         }
       },
       [](const ScenarioConfig& c) {
         std::string out;
         for (std::size_t i = 0; i < c.flows.size(); ++i) {
           if (i) out += ", ";
           out += std::to_string(c.flows[i].source.value) + ">" + std::to_string(c.flows[i].destination.value);
         }
         return out;
       }},
  };
  return specs;
}

const KeySpec* find_key(std::string_view key) {
  for (const auto& s : key_specs()) {
    if (s.name == key) return &s;
  }
  return nullptr;
}

void require(bool ok, const char* field, const std::string& message) {
  if (!ok) throw ConfigError(field, message);
}

// Largest energy the 16-bit centijoule wire field can carry.
constexpr double kMaxWireEnergy = 655.35;

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& s : key_specs()) out.emplace_back(s.name);
    return out;
  }();
  return keys;
}

bool is_config_key(std::string_view key) { return find_key(key) != nullptr; }

bool is_numeric_config_key(std::string_view key) {
  const KeySpec* s = find_key(key);
  return s != nullptr && s->numeric;
}

void set_config_value(ScenarioConfig& config, std::string_view key, std::string_view value) {
  const KeySpec* s = find_key(key);
  if (!s) throw ConfigError(std::string(key), "unknown configuration key");
  s->set(config, key, value);
}

std::string get_config_value(const ScenarioConfig& config, std::string_view key) {
  const KeySpec* s = find_key(key);
  if (!s) throw ConfigError(std::string(key), "unknown configuration key");
  return s->get(config);
}

ScenarioConfig parse_config(std::string_view text) {
  ScenarioConfig config;
  std::size_t line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = trim(line.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("", "line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    set_config_value(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return config;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_config_text(const ScenarioConfig& config) {
  std::string out;
  for (const auto& s : key_specs()) {
    out += std::string(s.name) + " = " + s.get(config) + "\n";
  }
  return out;
}

ScenarioConfig desk_config() {
  ScenarioConfig c;
  c.node_count = 20;
  c.area_width = 500.0;
  c.area_height = 500.0;
  c.sim_time = 60.0;
  return c;
}

ScenarioConfig resolve_config(const std::string& name_or_path) {
  if (name_or_path == "table2") return ScenarioConfig{};
  if (name_or_path == "desk") return desk_config();
  return load_config(name_or_path);
}

double ScenarioConfig::initial_energy_of(NodeId n) const {
  return initial_energies.empty() ? initial_energy : initial_energies.at(n.index());
}

double ScenarioConfig::initial_max() const {
  if (initial_energies.empty()) return initial_energy;
  return *std::max_element(initial_energies.begin(), initial_energies.end());
}

MobilityParams ScenarioConfig::mobility_params() const {
  return MobilityParams{speed_min, speed_max, pause_time, Area{area_width, area_height}};
}

OlsrParams ScenarioConfig::olsr_params() const {
  return OlsrParams{hello_interval, tc_interval, neighbor_hold, topology_hold, radio_range};
}

AisParams ScenarioConfig::ais_params() const {
  AisParams p;
  p.criteria = AntigenCriteria{energy_floor, detection_capacity};
  p.clonalg = ClonalgParams{top_n, dominance_margin, memory_capacity, meta_replacement};
  p.max_candidates = max_candidates;
  p.extra_hops = extra_hops;
  p.memory_max_age = memory_max_age;
  return p;
}

void ScenarioConfig::validate() const {
  require(node_count >= 2, "node_count", "must be at least 2");
  require(node_count <= 65535, "node_count", "must fit the 32-bit originator field and stay desk-sized (<= 65535)");
  require(area_width > 0.0, "area_width", "must be positive");
  require(area_height > 0.0, "area_height", "must be positive");
  require(area_width <= 6553.5 && area_height <= 6553.5, area_width > 6553.5 ? "area_width" : "area_height",
          "must fit the 16-bit decimeter coordinate field (<= 6553.5 m)");
  require(sim_time > 0.0, "sim_time", "must be positive");
  require(initial_energy > 0.0 && initial_energy <= kMaxWireEnergy, "initial_energy", "must lie in (0, 655.35] J");
  require(energy_floor >= 0.0 && energy_floor <= 1.0, "energy_floor", "must lie in [0, 1]");
  require(radio_range > 0.0, "radio_range", "must be positive");
  require(hello_interval > 0.0, "hello_interval", "must be positive");
  require(tc_interval > 0.0, "tc_interval", "must be positive");
  require(neighbor_hold > 0.0, "neighbor_hold", "must be positive");
  require(topology_hold > 0.0, "topology_hold", "must be positive");
  require(timer_jitter >= 0.0 && timer_jitter < 0.5, "timer_jitter", "must lie in [0, 0.5)");
  require(speed_min >= 0.0, "speed_min", "must be non-negative");
  require(speed_max >= speed_min, "speed_max", "must be at least speed_min");
  require(!(speed_max > 0.0) || speed_min > 0.0, "speed_min", "must be positive when nodes move");
  require(pause_time >= 0.0, "pause_time", "must be non-negative");
  require(mobility_step > 0.0, "mobility_step", "must be positive");
  require(packet_size > 0, "packet_size", "must be positive");
  require(packet_rate > 0.0, "packet_rate", "must be positive");
  require(traffic_start >= 0.0, "traffic_start", "must be non-negative");
  require(queue_limit > 0, "queue_limit", "must be positive");
  require(hop_latency > 0.0, "hop_latency", "must be positive");
  require(latency_jitter >= 0.0, "latency_jitter", "must be non-negative");
  require(data_ttl >= 1 && data_ttl <= 255, "data_ttl", "must lie in [1, 255]");
  require(ctrl_tx_cost >= 0.0, "ctrl_tx_cost", "must be non-negative");
  require(ctrl_rx_cost >= 0.0, "ctrl_rx_cost", "must be non-negative");
  require(data_tx_cost >= 0.0, "data_tx_cost", "must be non-negative");
  require(data_rx_cost >= 0.0, "data_rx_cost", "must be non-negative");
  require(detection_capacity > 0, "detection_capacity", "must be positive");
  require(top_n > 0, "top_n", "must be positive");
  require(dominance_margin >= 0.0, "dominance_margin", "must be non-negative");
  require(max_candidates > 0, "max_candidates", "must be positive");
  require(memory_capacity > 0, "memory_capacity", "must be positive");
  require(meta_replacement > 0, "meta_replacement", "must be positive");
  require(memory_max_age > 0.0, "memory_max_age", "must be positive");
  require(checkpoint_interval > 0.0, "checkpoint_interval", "must be positive");

  if (!positions.empty()) {
    require(positions.size() == node_count, "positions", "needs exactly node_count entries");
    const Area area{area_width, area_height};
    for (const auto& p : positions) require(area.contains(p), "positions", "every position must lie inside the area");
  }
  if (!initial_energies.empty()) {
    require(initial_energies.size() == node_count, "initial_energies", "needs exactly node_count entries");
    for (double e : initial_energies) {
      require(e > 0.0 && e <= kMaxWireEnergy, "initial_energies", "every entry must lie in (0, 655.35] J");
    }
  }
  for (const auto& f : flows) {
    require(f.source.index() < node_count && f.destination.index() < node_count, "flows",
            "flow endpoint outside node range");
    require(f.source != f.destination, "flows", "flow source and destination must differ");
  }
}

}  // namespace aisolsr
