#include "aisolsr/graph.hpp"

#include <algorithm>
#include <stdexcept>

namespace aisolsr {

void Graph::insert_half(NodeId from, NodeId to, double distance) {
  auto& list = adjacency_.at(from.index());
  auto it = std::lower_bound(list.begin(), list.end(), to,
                             [](const Adjacency& a, NodeId id) { return a.to < id; });
  if (it != list.end() && it->to == to) return;
  list.insert(it, Adjacency{to, distance});
}

void Graph::add_link(NodeId a, NodeId b, double distance) {
  if (a == b) return;
  if (has_link(a, b)) return;
  insert_half(a, b, distance);
  insert_half(b, a, distance);
}

std::optional<double> Graph::link_distance(NodeId a, NodeId b) const {
  if (a.index() >= adjacency_.size()) return std::nullopt;
  const auto& list = adjacency_[a.index()];
  auto it = std::lower_bound(list.begin(), list.end(), b,
                             [](const Adjacency& x, NodeId id) { return x.to < id; });
  if (it == list.end() || it->to != b) return std::nullopt;
  return it->distance;
}

bool Graph::has_link(NodeId a, NodeId b) const { return link_distance(a, b).has_value(); }

std::size_t Graph::link_count() const {
  std::size_t half = 0;
  for (const auto& list : adjacency_) half += list.size();
  return half / 2;
}

bool Graph::contains_path(std::span<const NodeId> nodes) const {
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (!has_link(nodes[i - 1], nodes[i])) return false;
  }
  return true;
}

Route make_route(std::vector<NodeId> nodes, const Graph& graph, const EnergyTable& energies) {
  if (nodes.size() < 2) throw std::invalid_argument("route needs at least two nodes");
  if (!is_loop_free(nodes)) throw std::invalid_argument("route repeats a node");
  Route r;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    auto d = graph.link_distance(nodes[i - 1], nodes[i]);
    if (!d) throw std::invalid_argument("route hop is not a link in the snapshot");
    r.length += *d;
  }
  for (std::size_t i = 1; i + 1 < nodes.size(); ++i) r.intermediate_energy += energies.joules(nodes[i]);
  r.nodes = std::move(nodes);
  return r;
}

}  // namespace aisolsr
