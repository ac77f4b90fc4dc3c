#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "aisolsr/codec.hpp"
#include "aisolsr/graph.hpp"
#include "aisolsr/types.hpp"

namespace aisolsr {

struct OlsrParams {
  double hello_interval = 2.0;
  double tc_interval = 5.0;
  double neighbor_hold = 6.0;
  double topology_hold = 15.0;
  /// Length assumed for a two-hop link whose far end has never reported a
  /// position. Callers set it to the radio range.
  double fallback_link_distance = 250.0;
};

/// One-hop neighbour as learned from its HELLOs.
struct LinkEntry {
  NodeId neighbor;
  double distance = 0.0;        // meters
  double neighbor_energy = 0.0; // joules, as last advertised
  Position neighbor_position;
  double last_heard = 0.0;
  bool symmetric = false;
  std::vector<NodeId> advertised;  // neighbour's own symmetric neighbours, self excluded
};

struct NeighborTables {
  std::map<NodeId, LinkEntry> one_hop;
  /// Strict two-hop node -> symmetric one-hop neighbours that reach it.
  std::map<NodeId, std::set<NodeId>> two_hop;
  std::set<NodeId> mpr_set;
  std::set<NodeId> mpr_selectors;

  bool is_symmetric(NodeId n) const;
  void rebuild_two_hop(NodeId self);
};

/// Greedy MPR cover: sole reachers first, then the neighbour covering most
/// uncovered two-hop nodes (ties: higher energy, then lower id).
std::set<NodeId> select_mpr(const NeighborTables& tables);

/// Link advertised by `from` (a TC originator) to one of its MPR selectors `to`.
struct TopologyEntry {
  NodeId from;
  NodeId to;
  double link_distance = 0.0;
  double to_energy = 0.0;
  std::uint16_t sequence = 0;
  double expires = 0.0;
};

struct RoutingTableEntry {
  NodeId destination;
  NodeId next_hop;
  std::size_t hop_count = 0;
  double length = 0.0;
};

using RoutingTable = std::map<NodeId, RoutingTableEntry>;

/// Minimum-hop routes from `self`; ties by total length, then lower next hop.
RoutingTable compute_routes_dijkstra(const Graph& graph, NodeId self);

/// The path behind compute_routes_dijkstra's entry for `dst`.
std::optional<Route> shortest_route(const Graph& graph, NodeId src, NodeId dst, const EnergyTable& energies);

/// RFC 3626 wraparound comparison: true if s1 is newer than s2.
bool sequence_newer(std::uint16_t s1, std::uint16_t s2);

struct TcOutcome {
  bool updated = false;
  bool forward = false;
};

/// Per-node OLSR state: neighbour sensing, MPR selection, TC origination and
/// flooding, topology set, and the routing table derived from them. HELLO
/// and TC carry the energy, distance and position extensions.
class OlsrAgent {
 public:
  OlsrAgent(NodeId self, std::size_t node_count, OlsrParams params);

  NodeId id() const { return self_; }
  const OlsrParams& params() const { return params_; }

  /// Nothing is emitted by a node without energy.
  std::optional<HelloMessage> emit_hello(Position position, double energy, double now);

  /// Returns false (and counts it) when the message is malformed.
  bool process_hello(const HelloMessage& msg, Position self_position, double now);

  /// Emitted only while some neighbour has selected this node as MPR.
  std::optional<TcMessage> emit_tc(Position position, double energy, double now);

  /// `sender` is the neighbour the copy was received from.
  TcOutcome process_tc(const TcMessage& msg, NodeId sender, double now);

  /// Drops neighbours, topology entries and duplicate records past their hold time.
  void expire(double now);

  const NeighborTables& neighbors() const { return tables_; }
  const std::map<std::pair<NodeId, NodeId>, TopologyEntry>& topology() const { return topology_; }
  std::uint64_t version() const { return version_; }
  std::size_t malformed_count() const { return malformed_; }

  /// Link graph from symmetric one-hop, two-hop and topology information,
  /// after expiring stale entries. Only symmetric one-hop links touch self.
  const Graph& graph(double now);
  /// Energies known for every node; `self_energy` is exact, others advertised.
  EnergyTable energy_view(double self_energy, double initial_max) const;
  const RoutingTable& routing_table(double now);

 private:
  struct KnownNode {
    double energy = 0.0;
    bool energy_known = false;
    Position position;
    bool position_known = false;
  };

  void note_energy(NodeId n, double joules);
  void note_position(NodeId n, Position p);
  bool valid_id(NodeId n) const { return n.index() < node_count_; }

  NodeId self_;
  std::size_t node_count_;
  OlsrParams params_;

  NeighborTables tables_;
  std::map<std::pair<NodeId, NodeId>, TopologyEntry> topology_;
  std::map<NodeId, std::uint16_t> latest_ansn_;
  struct Duplicate {
    double expires = 0.0;
    bool forwarded = false;
  };
  std::map<std::pair<NodeId, std::uint16_t>, Duplicate> duplicates_;
  std::vector<KnownNode> known_;

  std::uint16_t packet_sequence_ = 0;
  std::uint16_t message_sequence_ = 0;
  std::uint16_t ansn_ = 0;
  std::uint64_t version_ = 1;
  std::size_t malformed_ = 0;

  std::uint64_t graph_version_ = 0;
  Graph graph_;
  std::uint64_t routes_version_ = 0;
  RoutingTable routes_;
};

}  // namespace aisolsr
