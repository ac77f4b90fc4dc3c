#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "aisolsr/types.hpp"

namespace aisolsr {

struct Adjacency {
  NodeId to;
  double distance = 0.0;  // meters
};

/// Undirected link graph over a fixed node universe. Adjacency lists stay
/// sorted by neighbour id so every traversal is deterministic.
class Graph {
 public:
  Graph() = default;
  explicit Graph(std::size_t node_count) : adjacency_(node_count) {}

  std::size_t node_count() const { return adjacency_.size(); }

  /// Adds a-b if absent. An existing link keeps its first distance.
  void add_link(NodeId a, NodeId b, double distance);
  bool has_link(NodeId a, NodeId b) const;
  std::optional<double> link_distance(NodeId a, NodeId b) const;
  std::span<const Adjacency> neighbors(NodeId n) const { return adjacency_.at(n.index()); }
  std::size_t link_count() const;

  /// True if every consecutive pair of `nodes` is a link.
  bool contains_path(std::span<const NodeId> nodes) const;

 private:
  void insert_half(NodeId from, NodeId to, double distance);

  std::vector<std::vector<Adjacency>> adjacency_;
};

/// Builds a Route over `nodes`, caching length from link distances and the
/// intermediate energy sum from `energies`. Throws std::invalid_argument if a
/// hop is not a link or the sequence repeats a node.
Route make_route(std::vector<NodeId> nodes, const Graph& graph, const EnergyTable& energies);

}  // namespace aisolsr
