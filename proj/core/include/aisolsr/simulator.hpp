#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <set>
#include <variant>
#include <vector>

#include "aisolsr/ais.hpp"
#include "aisolsr/config.hpp"
#include "aisolsr/metrics.hpp"
#include "aisolsr/mobility.hpp"
#include "aisolsr/olsr.hpp"
#include "aisolsr/rng.hpp"
#include "aisolsr/trace.hpp"

namespace aisolsr {

/// Per-node energy bookkeeping in integer microjoules, so that
/// initial - debits == remaining holds exactly.
class EnergyLedger {
 public:
  enum class Debit { ok, depleted, refused };

  EnergyLedger() = default;
  explicit EnergyLedger(const std::vector<double>& initial_joules);

  /// `depleted`: debited and now empty. `refused`: could not pay (or was
  /// already dead); nothing debited. Either way the node is dead from `now`.
  Debit debit(NodeId n, std::int64_t microjoules, bool transmit, double now);

  bool alive(NodeId n) const { return !death_[n.index()].has_value(); }
  std::optional<double> death_time(NodeId n) const { return death_[n.index()]; }
  double remaining(NodeId n) const { return static_cast<double>(remaining_[n.index()]) * 1e-6; }
  std::int64_t remaining_microjoules(NodeId n) const { return remaining_[n.index()]; }
  std::int64_t initial_microjoules(NodeId n) const { return initial_[n.index()]; }
  std::int64_t tx_debits(NodeId n) const { return tx_[n.index()]; }
  std::int64_t rx_debits(NodeId n) const { return rx_[n.index()]; }
  bool balanced(NodeId n) const;
  std::size_t size() const { return remaining_.size(); }

 private:
  std::vector<std::int64_t> initial_;
  std::vector<std::int64_t> remaining_;
  std::vector<std::int64_t> tx_;
  std::vector<std::int64_t> rx_;
  std::vector<std::optional<double>> death_;
};

std::int64_t to_microjoules(double joules);

struct DataPacket {
  std::uint32_t flow = 0;
  std::uint64_t seq = 0;
  NodeId source;
  NodeId destination;
  std::uint32_t bytes = 0;
  double send_time = 0.0;
  std::uint32_t ttl = 64;
  std::vector<NodeId> stamped_route;  // source route (AIS-OLSR only)
  std::size_t hop_index = 0;          // position of the current holder in stamped_route
};

struct LedgerCheck {
  std::uint64_t checkpoints = 0;
  std::uint64_t node_checks = 0;
  std::uint64_t violations = 0;
};

struct RunDiagnostics {
  std::uint64_t malformed_control = 0;
  std::uint64_t control_queue_drops = 0;
  std::uint64_t events = 0;
  AisStats ais;
};

struct RunResult {
  ScenarioConfig config;
  MetricsReport metrics;
  std::vector<TraceRecord> trace;
  LedgerCheck ledger;
  RunDiagnostics diagnostics;
  std::vector<double> final_energy;
};

/// Deterministic discrete-event simulation of one scenario: unit-disk radio
/// with per-node FIFO interfaces, energy accounting, CBR traffic, random
/// waypoint motion, and OLSR or AIS-OLSR routing on every node.
class Simulator {
 public:
  /// Validates the configuration (ConfigError on failure) and builds nodes.
  explicit Simulator(ScenarioConfig config);
  ~Simulator();
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  /// Runs to sim_time and returns the report and trace.
  RunResult run();

  // Finer-grained control, mostly for tests.
  void start();
  /// Processes every event with time <= t.
  void run_until(double t);
  /// Closes the run: drops in-flight packets, writes the end row, computes metrics.
  RunResult finish();

  /// Unit-disk broadcast of a control packet from `sender`. Returns the nodes
  /// that will receive it; empty if the sender is dead or cannot pay.
  std::vector<NodeId> deliver(NodeId sender, std::vector<std::uint8_t> bytes);

  /// Injects one CBR packet of `flow` at its source now. Returns false if
  /// the source is dead (the flow has ended).
  bool cbr_tick(std::size_t flow);

  /// Makes `node` act on `packet`: deliver locally, forward, or drop.
  void forward_data(NodeId node, DataPacket packet);

  double now() const { return now_; }
  const ScenarioConfig& config() const { return config_; }
  const EnergyLedger& ledger() const { return ledger_; }
  Position position(NodeId n) const { return mobility_[n.index()].current; }
  OlsrAgent& agent(NodeId n) { return *agents_[n.index()]; }
  const AisRouter& ais_router(NodeId n) const { return *routers_[n.index()]; }
  const std::vector<Flow>& flows() const { return flows_; }
  const std::vector<TraceRecord>& trace() const { return trace_; }

 private:
  struct HelloTimer { NodeId node; };
  struct TcTimer { NodeId node; };
  struct MobilityTick {};
  struct TrafficTick { std::size_t flow; std::uint64_t index; };
  struct ControlArrival { NodeId receiver; NodeId sender; std::shared_ptr<const std::vector<std::uint8_t>> bytes; };
  struct DataArrival { NodeId receiver; NodeId sender; DataPacket packet; };
  struct Checkpoint {};
  using Payload = std::variant<HelloTimer, TcTimer, MobilityTick, TrafficTick, ControlArrival, DataArrival, Checkpoint>;

  struct Event {
    double time;
    std::uint64_t sequence;
    Payload payload;
  };
  struct EventAfter {
    bool operator()(const Event& a, const Event& b) const {
      return a.time != b.time ? a.time > b.time : a.sequence > b.sequence;
    }
  };

  void schedule(double time, Payload payload);
  void dispatch(Event& ev);
  void handle(const HelloTimer& e);
  void handle(const TcTimer& e);
  void handle(const MobilityTick& e);
  void handle(const TrafficTick& e);
  void handle(ControlArrival& e);
  void handle(DataArrival& e);
  void handle(const Checkpoint& e);

  double jittered(double interval, NodeId node);
  /// Reserves the interface of `node`; returns the departure-complete time or
  /// nullopt if the FIFO is full.
  std::optional<double> enqueue(NodeId node);
  bool pay(NodeId n, double joules, bool transmit);
  void record(TraceEvent ev, std::optional<NodeId> node, const DataPacket* packet, std::string reason = {},
              std::uint64_t ctrl_seq = 0, std::uint32_t ctrl_bytes = 0);
  void drop(NodeId node, const DataPacket& packet, const char* reason);
  void deliver_locally(NodeId node, const DataPacket& packet);
  void transmit_data(NodeId node, NodeId next, DataPacket packet);
  bool in_range(NodeId a, NodeId b) const;

  ScenarioConfig config_;
  double initial_max_ = 0.0;
  MobilityParams mobility_params_;
  std::vector<MobilityState> mobility_;
  std::vector<Rng> mobility_rng_;
  std::vector<Rng> timer_rng_;
  Rng radio_rng_;
  EnergyLedger ledger_;
  std::vector<std::unique_ptr<OlsrAgent>> agents_;
  std::vector<std::unique_ptr<AisRouter>> routers_;
  std::vector<Flow> flows_;
  std::vector<std::uint64_t> flow_next_seq_;
  std::vector<double> busy_until_;
  std::vector<std::deque<double>> departures_;

  std::priority_queue<Event, std::vector<Event>, EventAfter> queue_;
  std::uint64_t next_sequence_ = 0;
  double now_ = 0.0;
  bool started_ = false;

  std::set<std::pair<std::uint32_t, std::uint64_t>> in_flight_;
  std::vector<TraceRecord> trace_;
  LedgerCheck ledger_check_;
  RunDiagnostics diagnostics_;
};

/// Convenience: construct, run, return.
RunResult run_scenario(const ScenarioConfig& config);

}  // namespace aisolsr
