#include "aisolsr/olsr.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <tuple>

namespace aisolsr {

bool NeighborTables::is_symmetric(NodeId n) const {
  auto it = one_hop.find(n);
  return it != one_hop.end() && it->second.symmetric;
}

void NeighborTables::rebuild_two_hop(NodeId self) {
  two_hop.clear();
  for (const auto& [id, entry] : one_hop) {
    if (!entry.symmetric) continue;
    for (NodeId far : entry.advertised) {
      if (far == self || is_symmetric(far)) continue;
      two_hop[far].insert(id);
    }
  }
}

std::set<NodeId> select_mpr(const NeighborTables& tables) {
  std::set<NodeId> mpr;
  std::map<NodeId, std::set<NodeId>> reach;
  for (const auto& [far, via] : tables.two_hop) {
    for (NodeId n : via) reach[n].insert(far);
    if (via.size() == 1) mpr.insert(*via.begin());
  }

  std::set<NodeId> uncovered;
  for (const auto& [far, via] : tables.two_hop) {
    const bool covered = std::any_of(via.begin(), via.end(), [&](NodeId n) { return mpr.contains(n); });
    if (!covered) uncovered.insert(far);
  }

  auto energy_of = [&](NodeId n) {
    auto it = tables.one_hop.find(n);
    return it == tables.one_hop.end() ? 0.0 : it->second.neighbor_energy;
  };

  while (!uncovered.empty()) {
    std::optional<NodeId> best;
    std::size_t best_count = 0;
    for (const auto& [n, covers] : reach) {
      if (mpr.contains(n)) continue;
      const auto count = static_cast<std::size_t>(
          std::count_if(covers.begin(), covers.end(), [&](NodeId f) { return uncovered.contains(f); }));
      if (count == 0) continue;
      // reach is iterated by ascending id, so strict comparisons keep the lower id on full ties
      if (!best || count > best_count || (count == best_count && energy_of(n) > energy_of(*best))) {
        best = n;
        best_count = count;
      }
    }
    if (!best) break;
    mpr.insert(*best);
    for (NodeId f : reach[*best]) uncovered.erase(f);
  }
  return mpr;
}

bool sequence_newer(std::uint16_t s1, std::uint16_t s2) {
  constexpr std::uint16_t half = 32768;
  return (s1 > s2 && s1 - s2 <= half) || (s2 > s1 && s2 - s1 > half);
}

namespace {

struct Label {
  std::size_t hops = std::numeric_limits<std::size_t>::max();
  double length = 0.0;
  NodeId first_hop;
};

bool label_less(const Label& a, const Label& b) {
  return std::tie(a.hops, a.length, a.first_hop) < std::tie(b.hops, b.length, b.first_hop);
}

struct Tree {
  std::vector<Label> label;
  std::vector<std::optional<NodeId>> parent;
  std::vector<bool> reached;
};

Tree lexicographic_dijkstra(const Graph& g, NodeId src) {
  const std::size_t n = g.node_count();
  Tree t{std::vector<Label>(n), std::vector<std::optional<NodeId>>(n), std::vector<bool>(n, false)};
  std::vector<bool> settled(n, false);
  using Item = std::tuple<std::size_t, double, NodeId, NodeId>;  // hops, length, first hop, node
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;

  t.label[src.index()] = Label{0, 0.0, src};
  t.reached[src.index()] = true;
  pq.emplace(0, 0.0, src, src);
  while (!pq.empty()) {
    auto [hops, length, first, u] = pq.top();
    pq.pop();
    if (settled[u.index()]) continue;
    settled[u.index()] = true;
    for (const Adjacency& e : g.neighbors(u)) {
      if (settled[e.to.index()]) continue;
      Label cand{hops + 1, length + e.distance, u == src ? e.to : first};
      auto& cur = t.label[e.to.index()];
      if (!t.reached[e.to.index()] || label_less(cand, cur)) {
        cur = cand;
        t.reached[e.to.index()] = true;
        t.parent[e.to.index()] = u;
        pq.emplace(cand.hops, cand.length, cand.first_hop, e.to);
      }
    }
  }
  return t;
}

}  // namespace

RoutingTable compute_routes_dijkstra(const Graph& graph, NodeId self) {
  RoutingTable table;
  const Tree t = lexicographic_dijkstra(graph, self);
  for (std::size_t i = 0; i < graph.node_count(); ++i) {
    if (!t.reached[i] || i == self.index()) continue;
    const Label& l = t.label[i];
    table.emplace(NodeId(static_cast<std::uint32_t>(i)),
                  RoutingTableEntry{NodeId(static_cast<std::uint32_t>(i)), l.first_hop, l.hops, l.length});
  }
  return table;
}

std::optional<Route> shortest_route(const Graph& graph, NodeId src, NodeId dst, const EnergyTable& energies) {
  if (src == dst) return std::nullopt;
  const Tree t = lexicographic_dijkstra(graph, src);
  if (!t.reached[dst.index()]) return std::nullopt;
  std::vector<NodeId> nodes{dst};
  for (NodeId cur = dst; cur != src;) {
    cur = *t.parent[cur.index()];
    nodes.push_back(cur);
  }
  std::reverse(nodes.begin(), nodes.end());
  return make_route(std::move(nodes), graph, energies);
}

OlsrAgent::OlsrAgent(NodeId self, std::size_t node_count, OlsrParams params)
    : self_(self), node_count_(node_count), params_(params), known_(node_count), graph_(node_count) {}

void OlsrAgent::note_energy(NodeId n, double joules) {
  // Energy never increases, so the smallest report is the freshest bound.
  auto& k = known_[n.index()];
  if (!k.energy_known || joules < k.energy) {
    k.energy = joules;
    k.energy_known = true;
  }
}

void OlsrAgent::note_position(NodeId n, Position p) {
  known_[n.index()].position = p;
  known_[n.index()].position_known = true;
}

std::optional<HelloMessage> OlsrAgent::emit_hello(Position position, double energy, double now) {
  if (!(energy > 0.0)) return std::nullopt;
  expire(now);
  auto mprs = select_mpr(tables_);
  if (mprs != tables_.mpr_set) {
    tables_.mpr_set = std::move(mprs);
    ++version_;
  }

  HelloMessage m;
  m.header.packet_sequence = ++packet_sequence_;
  m.header.vtime = encode_vtime(params_.neighbor_hold);
  m.header.originator = self_;
  m.header.ttl = 1;
  m.header.hop_count = 0;
  m.header.message_sequence = ++message_sequence_;
  m.energy = energy;
  m.distance = 0.0;
  m.position = position;
  for (const auto& [id, e] : tables_.one_hop) {
    const LinkType lt = e.symmetric ? LinkType::symmetric : LinkType::asymmetric;
    NeighborType nt = NeighborType::none;
    if (tables_.mpr_set.contains(id)) {
      nt = NeighborType::mpr;
    } else if (e.symmetric) {
      nt = NeighborType::symmetric;
    }
    m.neighbors.push_back({make_link_code(lt, nt), id});
  }
  return m;
}

bool OlsrAgent::process_hello(const HelloMessage& msg, Position self_position, double now) {
  const NodeId origin = msg.header.originator;
  bool ok = origin != self_ && valid_id(origin);
  for (const auto& b : msg.neighbors) {
    ok = ok && valid_id(b.neighbor) && static_cast<unsigned>(neighbor_type_of(b.link_code)) <= 2 &&
         (b.link_code >> 4) == 0;
  }
  if (!ok) {
    ++malformed_;
    return false;
  }

  LinkEntry& e = tables_.one_hop[origin];
  e.neighbor = origin;
  e.distance = msg.distance + euclidean_distance(self_position, msg.position);
  e.neighbor_energy = msg.energy;
  e.neighbor_position = msg.position;
  e.last_heard = now;
  e.advertised.clear();

  bool lists_us = false;
  bool selects_us = false;
  for (const auto& b : msg.neighbors) {
    const LinkType lt = link_type_of(b.link_code);
    const NeighborType nt = neighbor_type_of(b.link_code);
    if (b.neighbor == self_) {
      lists_us = lt == LinkType::symmetric || lt == LinkType::asymmetric;
      selects_us = nt == NeighborType::mpr;
      continue;
    }
    if (nt == NeighborType::symmetric || nt == NeighborType::mpr) e.advertised.push_back(b.neighbor);
  }
  e.symmetric = lists_us;
  if (lists_us && selects_us) {
    tables_.mpr_selectors.insert(origin);
  } else {
    tables_.mpr_selectors.erase(origin);
  }
  if (!e.symmetric) tables_.mpr_set.erase(origin);

  tables_.rebuild_two_hop(self_);
  note_energy(origin, msg.energy);
  note_position(origin, msg.position);
  ++version_;
  return true;
}

std::optional<TcMessage> OlsrAgent::emit_tc(Position position, double energy, double now) {
  if (!(energy > 0.0)) return std::nullopt;
  expire(now);
  if (tables_.mpr_selectors.empty()) return std::nullopt;

  TcMessage m;
  m.header.packet_sequence = ++packet_sequence_;
  m.header.vtime = encode_vtime(params_.topology_hold);
  m.header.originator = self_;
  m.header.ttl = 255;
  m.header.hop_count = 0;
  m.header.message_sequence = ++message_sequence_;
  m.ansn = ++ansn_;
  m.originator_energy = energy;
  m.originator_position = position;
  for (NodeId s : tables_.mpr_selectors) {
    const LinkEntry& e = tables_.one_hop.at(s);
    m.advertised.push_back({s, e.distance, e.neighbor_energy});
  }
  return m;
}

TcOutcome OlsrAgent::process_tc(const TcMessage& msg, NodeId sender, double now) {
  const NodeId origin = msg.header.originator;
  if (origin == self_) return {};
  bool ok = valid_id(origin) && valid_id(sender);
  for (const auto& a : msg.advertised) ok = ok && valid_id(a.neighbor);
  if (!ok) {
    ++malformed_;
    return {};
  }
  if (!tables_.is_symmetric(sender)) return {};

  const auto key = std::make_pair(origin, msg.header.message_sequence);
  TcOutcome out;
  auto dup = duplicates_.find(key);
  if (dup == duplicates_.end()) {
    dup = duplicates_.emplace(key, Duplicate{now + params_.topology_hold, false}).first;
    auto latest = latest_ansn_.find(origin);
    const bool stale = latest != latest_ansn_.end() && sequence_newer(latest->second, msg.ansn);
    if (!stale) {
      if (latest == latest_ansn_.end() || sequence_newer(msg.ansn, latest->second)) {
        auto it = topology_.lower_bound({origin, NodeId(0)});
        while (it != topology_.end() && it->first.first == origin) it = topology_.erase(it);
      }
      latest_ansn_[origin] = msg.ansn;
      for (const auto& a : msg.advertised) {
        topology_[{origin, a.neighbor}] =
            TopologyEntry{origin, a.neighbor, a.distance, a.neighbor_energy, msg.ansn, now + params_.topology_hold};
        note_energy(a.neighbor, a.neighbor_energy);
      }
      note_energy(origin, msg.originator_energy);
      note_position(origin, msg.originator_position);
      ++version_;
      out.updated = true;
    }
  }
  // A copy first heard from a non-selector may still be relayed when a
  // selector's copy arrives later.
  if (!dup->second.forwarded && tables_.mpr_selectors.contains(sender) && msg.header.ttl > 1) {
    dup->second.forwarded = true;
    out.forward = true;
  }
  return out;
}

void OlsrAgent::expire(double now) {
  bool changed = false;
  for (auto it = tables_.one_hop.begin(); it != tables_.one_hop.end();) {
    if (now - it->second.last_heard > params_.neighbor_hold) {
      tables_.mpr_set.erase(it->first);
      tables_.mpr_selectors.erase(it->first);
      it = tables_.one_hop.erase(it);
      changed = true;
    } else {
      ++it;
    }
  }
  if (changed) tables_.rebuild_two_hop(self_);
  for (auto it = topology_.begin(); it != topology_.end();) {
    if (now > it->second.expires) {
      it = topology_.erase(it);
      changed = true;
    } else {
      ++it;
    }
  }
  std::erase_if(duplicates_, [now](const auto& kv) { return now > kv.second.expires; });
  if (changed) ++version_;
}

const Graph& OlsrAgent::graph(double now) {
  expire(now);
  if (graph_version_ == version_) return graph_;

  Graph g(node_count_);
  for (const auto& [id, e] : tables_.one_hop) {
    if (e.symmetric) g.add_link(self_, id, e.distance);
  }
  for (const auto& [key, t] : topology_) {
    if (t.from == self_ || t.to == self_) continue;
    g.add_link(t.from, t.to, t.link_distance);
  }
  for (const auto& [id, e] : tables_.one_hop) {
    if (!e.symmetric) continue;
    for (NodeId far : e.advertised) {
      if (far == self_) continue;
      const auto& k = known_[far.index()];
      const double d = k.position_known ? euclidean_distance(e.neighbor_position, k.position)
                                        : params_.fallback_link_distance;
      g.add_link(id, far, d);
    }
  }
  graph_ = std::move(g);
  graph_version_ = version_;
  return graph_;
}

EnergyTable OlsrAgent::energy_view(double self_energy, double initial_max) const {
  EnergyTable t;
  t.initial_max = initial_max;
  t.remaining.resize(node_count_, 0.0);
  for (std::size_t i = 0; i < node_count_; ++i) {
    if (known_[i].energy_known) t.remaining[i] = known_[i].energy;
  }
  t.remaining[self_.index()] = self_energy;
  return t;
}

const RoutingTable& OlsrAgent::routing_table(double now) {
  const Graph& g = graph(now);
  if (routes_version_ != version_) {
    routes_ = compute_routes_dijkstra(g, self_);
    routes_version_ = version_;
  }
  return routes_;
}

}  // namespace aisolsr
