#include "aisolsr/ais.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <stdexcept>
#include <tuple>

#include "aisolsr/olsr.hpp"

namespace aisolsr {

namespace {

struct Partial {
  std::size_t bound_hops;
  double bound_length;
  double length;
  std::vector<NodeId> nodes;
};

struct PartialAfter {
  bool operator()(const Partial& a, const Partial& b) const {
    return std::tie(a.bound_hops, a.bound_length, a.nodes) > std::tie(b.bound_hops, b.bound_length, b.nodes);
  }
};

constexpr double kLengthSlack = 1e-9;

}  // namespace

std::vector<Route> enumerate_candidate_routes(const Graph& graph, NodeId src, NodeId dst, std::size_t max_routes,
                                              std::size_t max_hops, const EnergyTable& energies) {
  if (src == dst) throw std::invalid_argument("candidate routes need distinct endpoints");
  if (max_routes == 0 || max_hops == 0) return {};

  // Lexicographic (hops, length) distance from every node to dst.
  const RoutingTable to_dst = compute_routes_dijkstra(graph, dst);
  const std::size_t n = graph.node_count();
  std::vector<std::size_t> rest_hops(n, std::numeric_limits<std::size_t>::max());
  std::vector<double> rest_length(n, 0.0);
  rest_hops[dst.index()] = 0;
  for (const auto& [node, entry] : to_dst) {
    rest_hops[node.index()] = entry.hop_count;
    rest_length[node.index()] = entry.length;
  }
  if (rest_hops[src.index()] > max_hops) return {};

  std::priority_queue<Partial, std::vector<Partial>, PartialAfter> frontier;
  frontier.push(Partial{rest_hops[src.index()], rest_length[src.index()], 0.0, {src}});

  std::vector<Route> found;
  while (!frontier.empty()) {
    if (found.size() >= max_routes) {
      std::sort(found.begin(), found.end(), route_less);
      found.resize(max_routes);
      const Route& kth = found.back();
      const Partial& next = frontier.top();
      if (kth.hop_count() < next.bound_hops ||
          (kth.hop_count() == next.bound_hops && kth.length < next.bound_length - kLengthSlack)) {
        break;
      }
    }
    Partial p = frontier.top();
    frontier.pop();

    const NodeId tail = p.nodes.back();
    if (tail == dst) {
      Route r;
      r.length = p.length;
      for (std::size_t i = 1; i + 1 < p.nodes.size(); ++i) r.intermediate_energy += energies.joules(p.nodes[i]);
      r.nodes = std::move(p.nodes);
      found.push_back(std::move(r));
      continue;
    }
    const std::size_t hops_so_far = p.nodes.size() - 1;
    for (const Adjacency& e : graph.neighbors(tail)) {
      const std::size_t rest = rest_hops[e.to.index()];
      if (rest == std::numeric_limits<std::size_t>::max()) continue;
      if (hops_so_far + 1 + rest > max_hops) continue;
      if (std::find(p.nodes.begin(), p.nodes.end(), e.to) != p.nodes.end()) continue;
      Partial next;
      next.length = p.length + e.distance;
      next.bound_hops = hops_so_far + 1 + rest;
      next.bound_length = next.length + rest_length[e.to.index()];
      next.nodes = p.nodes;
      next.nodes.push_back(e.to);
      frontier.push(std::move(next));
    }
  }

  std::sort(found.begin(), found.end(), route_less);
  if (found.size() > max_routes) found.resize(max_routes);
  return found;
}

bool passes_energy_test(const Route& route, double energy_floor, const EnergyTable& energies) {
  for (NodeId n : route.intermediates()) {
    if (energies.normalized(n) < energy_floor) return false;
  }
  return true;
}

bool DetectionSet::offer(Route route) {
  if (capacity_ == 0) return false;
  if (routes_.size() >= capacity_) {
    if (!route_less(route, routes_.back())) return false;
    routes_.pop_back();
  }
  auto at = std::upper_bound(routes_.begin(), routes_.end(), route, route_less);
  routes_.insert(at, std::move(route));
  return true;
}

DetectionSet negative_selection_filter(std::span<const Route> candidates, const AntigenCriteria& criteria,
                                       const EnergyTable& energies) {
  DetectionSet set(criteria.detection_capacity);
  for (const Route& r : candidates) {
    if (passes_energy_test(r, criteria.energy_floor, energies)) set.offer(r);
  }
  return set;
}

double affinity(const Route& route, const EnergyTable& energies) {
  if (route.hop_count() < 2) throw std::invalid_argument("affinity is undefined for a direct route");
  double sum = 0.0;
  for (NodeId n : route.intermediates()) sum += energies.joules(n);
  return sum / static_cast<double>(route.hop_count());
}

void ClonalgParams::validate() const {
  if (top_n == 0) throw std::invalid_argument("top_n must be at least 1");
  if (!(dominance_margin >= 0.0)) throw std::invalid_argument("dominance_margin must be non-negative");
  if (memory_capacity == 0) throw std::invalid_argument("memory_capacity must be positive");
  if (meta_replacement == 0) throw std::invalid_argument("meta_replacement must be positive");
}

std::optional<Route> clonalg_select(const DetectionSet& set, const ClonalgParams& params,
                                    const EnergyTable& energies) {
  if (set.empty()) return std::nullopt;
  const auto routes = set.routes();
  for (const Route& r : routes) {
    if (r.hop_count() == 1) return r;
  }

  std::vector<std::pair<double, std::size_t>> ranked;
  ranked.reserve(routes.size());
  for (std::size_t i = 0; i < routes.size(); ++i) ranked.emplace_back(affinity(routes[i], energies), i);
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

  if (ranked.size() == 1) return routes[ranked[0].second];
  const double best = ranked[0].first;
  const double second = ranked[1].first;
  if (best - second > params.dominance_margin * second) return routes[ranked[0].second];

  // Close affinities: mutate by comparing the top N on distance.
  const std::size_t pool = std::min(params.top_n, ranked.size());
  const Route* winner = &routes[ranked[0].second];
  for (std::size_t j = 1; j < pool; ++j) {
    const Route& r = routes[ranked[j].second];
    if (r.length < winner->length || (r.length == winner->length && r.nodes < winner->nodes)) winner = &r;
  }
  return *winner;
}

const MemoryEntry* ImmuneMemory::find(NodeId src, NodeId dst) const {
  auto it = entries_.find({src, dst});
  return it == entries_.end() ? nullptr : &it->second;
}

void ImmuneMemory::store(NodeId src, NodeId dst, MemoryEntry entry) {
  entries_[{src, dst}] = std::move(entry);
  if (entries_.size() <= capacity_) return;

  std::vector<std::tuple<double, double, std::pair<NodeId, NodeId>>> order;
  order.reserve(entries_.size());
  for (const auto& [key, e] : entries_) order.emplace_back(e.affinity, e.stored_at, key);
  std::sort(order.begin(), order.end());
  const std::size_t drop = std::min(meta_replacement_, order.size());
  for (std::size_t i = 0; i < drop; ++i) entries_.erase(std::get<2>(order[i]));
}

void AisParams::validate() const {
  criteria.validate();
  clonalg.validate();
  if (max_candidates == 0) throw std::invalid_argument("max_candidates must be positive");
  if (!(memory_max_age > 0.0)) throw std::invalid_argument("memory_max_age must be positive");
}

AisRouter::AisRouter(NodeId self, AisParams params)
    : self_(self),
      params_(params),
      memory_(params.clonalg.memory_capacity, params.clonalg.meta_replacement) {}

bool AisRouter::still_valid(const MemoryEntry& entry, const Graph& graph, const EnergyTable& energies,
                            double now) const {
  if (now - entry.stored_at > params_.memory_max_age) return false;
  if (!graph.contains_path(entry.route.nodes)) return false;
  return passes_energy_test(entry.route, params_.criteria.energy_floor, energies);
}

std::optional<AisDecision> AisRouter::route(NodeId dst, const Graph& graph, const EnergyTable& energies,
                                            std::uint64_t topology_version, double now) {
  if (dst == self_) return std::nullopt;
  if (const MemoryEntry* cached = memory_.find(self_, dst)) {
    if (still_valid(*cached, graph, energies, now)) {
      ++stats_.memory_hits;
      return AisDecision{cached->route, RouteOrigin::memory};
    }
    memory_.erase(self_, dst);
    ++stats_.invalidations;
  }

  auto shortest = shortest_route(graph, self_, dst, energies);
  if (!shortest) return std::nullopt;

  ++stats_.pipeline_runs;
  const auto candidates = enumerate_candidate_routes(graph, self_, dst, params_.max_candidates,
                                                     shortest->hop_count() + params_.extra_hops, energies);
  const DetectionSet detection = negative_selection_filter(candidates, params_.criteria, energies);
  if (auto chosen = clonalg_select(detection, params_.clonalg, energies)) {
    const double score =
        chosen->hop_count() == 1 ? std::numeric_limits<double>::infinity() : affinity(*chosen, energies);
    memory_.store(self_, dst, MemoryEntry{*chosen, now, topology_version, score});
    return AisDecision{std::move(*chosen), RouteOrigin::pipeline};
  }
  ++stats_.fallbacks;
  return AisDecision{std::move(*shortest), RouteOrigin::shortest_path_fallback};
}

}  // namespace aisolsr
