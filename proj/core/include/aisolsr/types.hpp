#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>
#include <span>
#include <vector>

namespace aisolsr {

/// Index of a node within one scenario. Always < node_count.
struct NodeId {
  std::uint32_t value = 0;

  constexpr NodeId() = default;
  constexpr explicit NodeId(std::uint32_t v) : value(v) {}

  constexpr std::size_t index() const { return value; }

  friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

inline std::ostream& operator<<(std::ostream& os, NodeId id) { return os << id.value; }

/// Planar coordinates in meters.
struct Position {
  double x = 0.0;
  double y = 0.0;

  friend constexpr bool operator==(const Position&, const Position&) = default;
};

/// Straight-line distance between two positions, in meters.
double euclidean_distance(Position a, Position b);

struct EnergyState {
  double remaining = 0.0;    // joules
  double initial_max = 0.0;  // scenario-wide maximum initial energy, joules
};

/// remaining / initial_max. Throws std::invalid_argument if initial_max <= 0.
double normalized_energy(const EnergyState& e);

/// Energy of every node as seen by one observer, normalised against the
/// scenario-wide maximum initial energy. Unknown nodes carry 0 J.
struct EnergyTable {
  std::vector<double> remaining;
  double initial_max = 0.0;

  double joules(NodeId n) const { return remaining.at(n.index()); }
  double normalized(NodeId n) const { return normalized_energy({joules(n), initial_max}); }
};

/// A loop-free node sequence, source first. Doubles as the immune-system
/// antibody: hop count, intermediate energy and geometric length are cached
/// from the snapshot the route was built against.
struct Route {
  std::vector<NodeId> nodes;
  double length = 0.0;               // meters
  double intermediate_energy = 0.0;  // joules, sum over nodes[1..n-2]

  std::size_t hop_count() const { return nodes.empty() ? 0 : nodes.size() - 1; }
  NodeId source() const { return nodes.front(); }
  NodeId destination() const { return nodes.back(); }
  std::span<const NodeId> intermediates() const;

  friend bool operator==(const Route&, const Route&) = default;
};

/// Total ordering used everywhere routes compete: fewer hops, then shorter
/// length, then lexicographically smaller node sequence.
bool route_less(const Route& a, const Route& b);

bool is_loop_free(std::span<const NodeId> nodes);

/// Sum of per-hop euclidean distances along `nodes`.
double route_length(std::span<const NodeId> nodes, std::span<const Position> positions);

/// Thresholds the negative-selection stage tests candidate routes against.
struct AntigenCriteria {
  double energy_floor = 0.5;          // normalised, in [0, 1]
  std::size_t detection_capacity = 4; // n

  void validate() const;
};

}  // namespace aisolsr

template <>
struct std::hash<aisolsr::NodeId> {
  std::size_t operator()(aisolsr::NodeId id) const noexcept { return std::hash<std::uint32_t>{}(id.value); }
};
