#include "aisolsr/types.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace aisolsr {

double euclidean_distance(Position a, Position b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

double normalized_energy(const EnergyState& e) {
  if (!(e.initial_max > 0.0)) {
    throw std::invalid_argument("initial_max must be positive to normalise energy");
  }
  return e.remaining / e.initial_max;
}

std::span<const NodeId> Route::intermediates() const {
  if (nodes.size() <= 2) return {};
  return std::span<const NodeId>(nodes).subspan(1, nodes.size() - 2);
}

bool route_less(const Route& a, const Route& b) {
  if (a.hop_count() != b.hop_count()) return a.hop_count() < b.hop_count();
  if (a.length != b.length) return a.length < b.length;
  return a.nodes < b.nodes;
}

bool is_loop_free(std::span<const NodeId> nodes) {
  std::unordered_set<NodeId> seen;
  for (NodeId n : nodes) {
    if (!seen.insert(n).second) return false;
  }
  return true;
}

double route_length(std::span<const NodeId> nodes, std::span<const Position> positions) {
  double total = 0.0;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    total += euclidean_distance(positions[nodes[i - 1].index()], positions[nodes[i].index()]);
  }
  return total;
}

void AntigenCriteria::validate() const {
  if (!(energy_floor >= 0.0 && energy_floor <= 1.0)) {
    throw std::invalid_argument("energy_floor must lie in [0, 1]");
  }
  if (detection_capacity == 0) {
    throw std::invalid_argument("detection_capacity must be positive");
  }
}

}  // namespace aisolsr
