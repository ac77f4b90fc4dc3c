#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "aisolsr/graph.hpp"
#include "aisolsr/types.hpp"

namespace aisolsr {

/// Up to `max_routes` loop-free src->dst paths with at most `max_hops` hops,
/// the best under route_less. Best-first search over partial paths, bounded
/// below by the lexicographic (hops, length) distance to `dst`, so the
/// minimum-hop path is always included when it fits within `max_hops`.
std::vector<Route> enumerate_candidate_routes(const Graph& graph, NodeId src, NodeId dst, std::size_t max_routes,
                                              std::size_t max_hops, const EnergyTable& energies);

/// True unless some intermediate node's normalised energy is strictly below
/// `energy_floor`. Direct routes pass vacuously.
bool passes_energy_test(const Route& route, double energy_floor, const EnergyTable& energies);

/// Capacity-bounded array of surviving routes, kept sorted by route_less.
/// A full array admits a newcomer only if it beats the current worst member,
/// which is then evicted.
class DetectionSet {
 public:
  explicit DetectionSet(std::size_t capacity) : capacity_(capacity) {}

  bool offer(Route route);

  std::span<const Route> routes() const { return routes_; }
  std::size_t size() const { return routes_.size(); }
  bool empty() const { return routes_.empty(); }
  std::size_t capacity() const { return capacity_; }

 private:
  std::size_t capacity_;
  std::vector<Route> routes_;
};

/// Negative selection: reject routes failing the energy antigen, then keep
/// the `detection_capacity` fewest-hop survivors.
DetectionSet negative_selection_filter(std::span<const Route> candidates, const AntigenCriteria& criteria,
                                       const EnergyTable& energies);

/// Intermediate energy sum over hop count. Direct routes have no
/// intermediates and are rejected with std::invalid_argument.
double affinity(const Route& route, const EnergyTable& energies);

struct ClonalgParams {
  std::size_t top_n = 3;            // N: routes entering the mutation stage
  double dominance_margin = 0.05;   // relative gap that skips mutation
  std::size_t memory_capacity = 64;
  std::size_t meta_replacement = 8; // m: entries evicted when memory overflows

  void validate() const;
};

/// Picks the final route from a detection set. A direct route wins outright.
/// Otherwise the highest-affinity route wins if it beats the runner-up by
/// more than the dominance margin; if not, the shortest (in meters) of the
/// top_n highest-affinity routes is taken.
std::optional<Route> clonalg_select(const DetectionSet& set, const ClonalgParams& params,
                                    const EnergyTable& energies);

struct MemoryEntry {
  Route route;
  double stored_at = 0.0;
  std::uint64_t topology_version = 0;
  double affinity = 0.0;  // +inf for direct routes
};

/// Per-(source, destination) cache of selected routes.
class ImmuneMemory {
 public:
  ImmuneMemory(std::size_t capacity, std::size_t meta_replacement)
      : capacity_(capacity), meta_replacement_(meta_replacement) {}

  const MemoryEntry* find(NodeId src, NodeId dst) const;
  /// Overflow evicts the meta_replacement lowest-affinity entries.
  void store(NodeId src, NodeId dst, MemoryEntry entry);
  void erase(NodeId src, NodeId dst) { entries_.erase({src, dst}); }
  std::size_t size() const { return entries_.size(); }

 private:
  std::size_t capacity_;
  std::size_t meta_replacement_;
  std::map<std::pair<NodeId, NodeId>, MemoryEntry> entries_;
};

struct AisParams {
  AntigenCriteria criteria;
  ClonalgParams clonalg;
  std::size_t max_candidates = 16;  // K
  std::size_t extra_hops = 3;       // H = minimum hops + extra_hops
  double memory_max_age = 10.0;     // seconds

  void validate() const;
};

enum class RouteOrigin { memory, pipeline, shortest_path_fallback };

struct AisDecision {
  Route route;
  RouteOrigin origin = RouteOrigin::pipeline;
};

struct AisStats {
  std::size_t pipeline_runs = 0;
  std::size_t memory_hits = 0;
  std::size_t invalidations = 0;
  std::size_t fallbacks = 0;
};

/// Source-side route selection for one node: memory lookup, otherwise
/// enumerate -> negative selection -> clonal selection, falling back to the
/// minimum-hop route when the immune pipeline yields nothing.
class AisRouter {
 public:
  AisRouter(NodeId self, AisParams params);

  /// nullopt when `dst` is unreachable in `graph`.
  std::optional<AisDecision> route(NodeId dst, const Graph& graph, const EnergyTable& energies,
                                   std::uint64_t topology_version, double now);

  /// Link still present, every intermediate at or above the floor, not too old.
  bool still_valid(const MemoryEntry& entry, const Graph& graph, const EnergyTable& energies, double now) const;

  const AisStats& stats() const { return stats_; }
  const ImmuneMemory& memory() const { return memory_; }
  const AisParams& params() const { return params_; }

 private:
  NodeId self_;
  AisParams params_;
  ImmuneMemory memory_;
  AisStats stats_;
};

}  // namespace aisolsr
