#include <gtest/gtest.h>

#include <deque>
#include <set>
#include <vector>

#include "aisolsr/olsr.hpp"
#include "oracles.hpp"

using namespace aisolsr;
using oracle::id;

namespace {

constexpr auto kSymMpr = make_link_code(LinkType::symmetric, NeighborType::mpr);
constexpr auto kSymSym = make_link_code(LinkType::symmetric, NeighborType::symmetric);

HelloMessage hello_from(std::uint32_t origin, Position pos, double energy, std::vector<NeighborBlock> blocks) {
  HelloMessage h;
  h.header.originator = NodeId(origin);
  h.header.ttl = 1;
  h.energy = energy;
  h.position = pos;
  h.neighbors = std::move(blocks);
  return h;
}

// Runs HELLO rounds over the links of g until neighbour state settles.
std::vector<OlsrAgent> converge_hellos(const Graph& g, const std::vector<Position>& pos, double t0, int rounds) {
  std::vector<OlsrAgent> agents;
  for (std::size_t i = 0; i < g.node_count(); ++i) agents.emplace_back(id(i), g.node_count(), OlsrParams{});
  for (int round = 0; round < rounds; ++round) {
    const double t = t0 + round;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
      const auto h = agents[i].emit_hello(pos[i], 10.0, t);
      for (const auto& e : g.neighbors(id(i))) agents[e.to.index()].process_hello(*h, pos[e.to.index()], t);
    }
  }
  return agents;
}

}  // namespace

TEST(EmitHello, CopiesOwnFieldsWithZeroDistance) {
  OlsrAgent a(NodeId(3), 10, OlsrParams{});
  const auto h = a.emit_hello({100, 200}, 7.5, 0.0);
  ASSERT_TRUE(h);
  EXPECT_EQ(h->header.originator, NodeId(3));
  EXPECT_EQ(h->header.ttl, 1);
  EXPECT_EQ(h->position, (Position{100, 200}));
  EXPECT_DOUBLE_EQ(h->energy, 7.5);
  EXPECT_DOUBLE_EQ(h->distance, 0.0);
  EXPECT_TRUE(h->neighbors.empty());
}

TEST(EmitHello, DeadNodeIsSilent) {
  OlsrAgent a(NodeId(3), 10, OlsrParams{});
  EXPECT_FALSE(a.emit_hello({0, 0}, 0.0, 0.0));
}

TEST(ProcessHello, LinkDistanceAndEnergy) {
  OlsrAgent a(NodeId(0), 4, OlsrParams{});
  ASSERT_TRUE(a.process_hello(hello_from(1, {3, 4}, 9.0, {}), {0, 0}, 1.0));
  const auto& e = a.neighbors().one_hop.at(NodeId(1));
  EXPECT_DOUBLE_EQ(e.distance, 5.0);
  EXPECT_DOUBLE_EQ(e.neighbor_energy, 9.0);
  EXPECT_DOUBLE_EQ(e.last_heard, 1.0);
  EXPECT_FALSE(e.symmetric);
}

TEST(ProcessHello, RepeatRefreshesWithoutGrowing) {
  OlsrAgent a(NodeId(0), 4, OlsrParams{});
  a.process_hello(hello_from(1, {3, 4}, 9.0, {}), {0, 0}, 1.0);
  a.process_hello(hello_from(1, {3, 4}, 8.5, {}), {0, 0}, 2.0);
  EXPECT_EQ(a.neighbors().one_hop.size(), 1u);
  EXPECT_DOUBLE_EQ(a.neighbors().one_hop.at(NodeId(1)).last_heard, 2.0);
  EXPECT_DOUBLE_EQ(a.neighbors().one_hop.at(NodeId(1)).neighbor_energy, 8.5);
}

TEST(ProcessHello, TwoHopExcludesSelf) {
  // self = A(0); neighbour 1 advertises {A, B(2)}
  OlsrAgent a(NodeId(0), 4, OlsrParams{});
  a.process_hello(hello_from(1, {10, 0}, 9.0, {{kSymSym, NodeId(0)}, {kSymSym, NodeId(2)}}), {0, 0}, 1.0);
  const auto& t = a.neighbors();
  EXPECT_TRUE(t.is_symmetric(NodeId(1)));
  ASSERT_EQ(t.two_hop.size(), 1u);
  EXPECT_EQ(t.two_hop.at(NodeId(2)), std::set<NodeId>{NodeId(1)});
  EXPECT_FALSE(t.two_hop.contains(NodeId(0)));
}

TEST(ProcessHello, MalformedIsCounted) {
  OlsrAgent a(NodeId(0), 4, OlsrParams{});
  EXPECT_FALSE(a.process_hello(hello_from(9, {0, 0}, 1.0, {}), {0, 0}, 0.0));
  EXPECT_FALSE(a.process_hello(hello_from(1, {0, 0}, 1.0, {{kSymSym, NodeId(77)}}), {0, 0}, 0.0));
  EXPECT_FALSE(a.process_hello(hello_from(0, {0, 0}, 1.0, {}), {0, 0}, 0.0));
  EXPECT_EQ(a.malformed_count(), 3u);
  EXPECT_TRUE(a.neighbors().one_hop.empty());
}

TEST(SelectMpr, ChainPicksTheOnlyRelay) {
  Graph g(3);
  g.add_link(id(0), id(1), 1);
  g.add_link(id(1), id(2), 1);
  const auto t = oracle::tables_from_graph(g, id(0), {1, 1, 1});
  EXPECT_EQ(select_mpr(t), std::set<NodeId>{id(1)});
}

TEST(SelectMpr, NothingToCover) {
  Graph g(3);
  g.add_link(id(0), id(1), 1);
  g.add_link(id(0), id(2), 1);
  g.add_link(id(1), id(2), 1);
  EXPECT_TRUE(select_mpr(oracle::tables_from_graph(g, id(0), {1, 1, 1})).empty());
}

TEST(SelectMpr, DisjointPairsNeedBoth) {
  // 1 alone reaches 3, 2 alone reaches 5, both reach 4
  Graph g(6);
  g.add_link(id(0), id(1), 1);
  g.add_link(id(0), id(2), 1);
  g.add_link(id(1), id(3), 1);
  g.add_link(id(1), id(4), 1);
  g.add_link(id(2), id(5), 1);
  g.add_link(id(2), id(4), 1);
  const auto t = oracle::tables_from_graph(g, id(0), std::vector<double>(6, 1));
  const auto mpr = select_mpr(t);
  EXPECT_EQ(mpr, (std::set<NodeId>{id(1), id(2)}));
  EXPECT_EQ(mpr.size(), oracle::min_mpr_cover_size(t));
}

TEST(SelectMpr, TieBrokenByEnergyThenId) {
  // 1, 2 and 3 all reach only node 4
  Graph g(5);
  for (std::uint32_t k : {1u, 2u, 3u}) {
    g.add_link(id(0), id(k), 1);
    g.add_link(id(k), id(4), 1);
  }
  EXPECT_EQ(select_mpr(oracle::tables_from_graph(g, id(0), {0, 2, 5, 5, 0})), std::set<NodeId>{id(2)});
  EXPECT_EQ(select_mpr(oracle::tables_from_graph(g, id(0), {0, 5, 5, 5, 0})), std::set<NodeId>{id(1)});
}

TEST(SelectMpr, CoversEveryTwoHopNodeOnRandomGraphs) {
  Rng rng = make_stream(101, StreamKind::placement);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 3 + uniform_index(rng, 18);
    const auto rg = oracle::random_graph(rng, n, 0.25, uniform01(rng) < 0.7);
    std::vector<double> energy;
    for (std::size_t i = 0; i < n; ++i) energy.push_back(uniform(rng, 0, 10));
    const NodeId self = id(uniform_index(rng, n));
    const auto t = oracle::tables_from_graph(rg.graph, self, energy);
    const auto mpr = select_mpr(t);
    for (NodeId m : mpr) ASSERT_TRUE(t.one_hop.contains(m));
    for (const auto& [far, via] : t.two_hop) {
      bool covered = false;
      for (NodeId v : via) covered = covered || mpr.contains(v);
      ASSERT_TRUE(covered) << "two-hop node " << far << " uncovered";
    }
  }
}

TEST(EmitTc, AdvertisesSelectorsWithStoredDistances) {
  OlsrAgent a(NodeId(0), 8, OlsrParams{});
  a.process_hello(hello_from(2, {30, 40}, 6.0, {{kSymMpr, NodeId(0)}}), {0, 0}, 1.0);
  a.process_hello(hello_from(5, {0, 12}, 4.0, {{kSymMpr, NodeId(0)}}), {0, 0}, 1.0);
  a.process_hello(hello_from(6, {0, 1}, 4.0, {{kSymSym, NodeId(0)}}), {0, 0}, 1.0);
  const auto tc = a.emit_tc({0, 0}, 9.0, 1.5);
  ASSERT_TRUE(tc);
  ASSERT_EQ(tc->advertised.size(), 2u);
  EXPECT_EQ(tc->advertised[0], (AdvertisedLink{NodeId(2), 50.0, 6.0}));
  EXPECT_EQ(tc->advertised[1], (AdvertisedLink{NodeId(5), 12.0, 4.0}));
  EXPECT_DOUBLE_EQ(tc->originator_energy, 9.0);
  const auto tc2 = a.emit_tc({0, 0}, 9.0, 2.0);
  EXPECT_TRUE(sequence_newer(tc2->ansn, tc->ansn));
  EXPECT_GT(tc2->header.message_sequence, tc->header.message_sequence);
}

TEST(EmitTc, NeverSelectedMeansNoTc) {
  OlsrAgent a(NodeId(0), 8, OlsrParams{});
  a.process_hello(hello_from(2, {3, 4}, 6.0, {{kSymSym, NodeId(0)}}), {0, 0}, 1.0);
  EXPECT_FALSE(a.emit_tc({0, 0}, 9.0, 1.0));
}

namespace {

// Node 0 with symmetric neighbours 1 (selects 0 as MPR) and 2 (does not).
OlsrAgent relay_agent() {
  OlsrAgent a(NodeId(0), 8, OlsrParams{});
  a.process_hello(hello_from(1, {10, 0}, 6.0, {{kSymMpr, NodeId(0)}}), {0, 0}, 0.0);
  a.process_hello(hello_from(2, {0, 10}, 6.0, {{kSymSym, NodeId(0)}}), {0, 0}, 0.0);
  return a;
}

TcMessage tc_from(std::uint32_t origin, std::uint16_t seq, std::uint16_t ansn, std::vector<AdvertisedLink> links) {
  TcMessage m;
  m.header.originator = NodeId(origin);
  m.header.ttl = 255;
  m.header.message_sequence = seq;
  m.ansn = ansn;
  m.originator_energy = 7.0;
  m.advertised = std::move(links);
  return m;
}

}  // namespace

TEST(ProcessTc, FreshFromSelectorUpdatesAndForwardsOnce) {
  OlsrAgent a = relay_agent();
  const auto tc = tc_from(5, 1, 1, {{NodeId(6), 40.0, 3.0}});
  const auto first = a.process_tc(tc, NodeId(1), 1.0);
  EXPECT_TRUE(first.updated);
  EXPECT_TRUE(first.forward);
  EXPECT_TRUE(a.topology().contains({NodeId(5), NodeId(6)}));
  const auto again = a.process_tc(tc, NodeId(1), 1.1);
  EXPECT_FALSE(again.updated);
  EXPECT_FALSE(again.forward);
}

TEST(ProcessTc, NonSelectorSenderUpdatesButDoesNotForward) {
  OlsrAgent a = relay_agent();
  const auto out = a.process_tc(tc_from(5, 1, 1, {{NodeId(6), 40.0, 3.0}}), NodeId(2), 1.0);
  EXPECT_TRUE(out.updated);
  EXPECT_FALSE(out.forward);
}

TEST(ProcessTc, StaleAnsnIgnoredNewerReplaces) {
  OlsrAgent a = relay_agent();
  a.process_tc(tc_from(5, 1, 10, {{NodeId(6), 40.0, 3.0}}), NodeId(1), 1.0);
  const auto stale = a.process_tc(tc_from(5, 2, 9, {{NodeId(7), 40.0, 3.0}}), NodeId(1), 1.0);
  EXPECT_FALSE(stale.updated);
  EXPECT_FALSE(a.topology().contains({NodeId(5), NodeId(7)}));
  const auto newer = a.process_tc(tc_from(5, 3, 11, {{NodeId(7), 40.0, 3.0}}), NodeId(1), 1.0);
  EXPECT_TRUE(newer.updated);
  EXPECT_TRUE(a.topology().contains({NodeId(5), NodeId(7)}));
  EXPECT_FALSE(a.topology().contains({NodeId(5), NodeId(6)}));
}

TEST(ProcessTc, DuplicateFromSelectorIsRelayedIfNotYetForwarded) {
  OlsrAgent a = relay_agent();
  const auto tc = tc_from(5, 1, 1, {{NodeId(6), 40.0, 3.0}});
  EXPECT_FALSE(a.process_tc(tc, NodeId(2), 1.0).forward);
  const auto second = a.process_tc(tc, NodeId(1), 1.0);
  EXPECT_FALSE(second.updated);
  EXPECT_TRUE(second.forward);
  EXPECT_FALSE(a.process_tc(tc, NodeId(1), 1.0).forward);
}

TEST(ProcessTc, IgnoredFromNonSymmetricSender) {
  OlsrAgent a = relay_agent();
  const auto out = a.process_tc(tc_from(5, 1, 1, {{NodeId(6), 40.0, 3.0}}), NodeId(4), 1.0);
  EXPECT_FALSE(out.updated);
  EXPECT_FALSE(out.forward);
}

TEST(ProcessTc, TtlOneIsNotForwarded) {
  OlsrAgent a = relay_agent();
  auto tc = tc_from(5, 1, 1, {{NodeId(6), 40.0, 3.0}});
  tc.header.ttl = 1;
  EXPECT_FALSE(a.process_tc(tc, NodeId(1), 1.0).forward);
}

TEST(SequenceNumbers, WraparoundComparison) {
  EXPECT_TRUE(sequence_newer(2, 1));
  EXPECT_FALSE(sequence_newer(1, 2));
  EXPECT_TRUE(sequence_newer(0, 65535));
  EXPECT_FALSE(sequence_newer(65535, 0));
  EXPECT_FALSE(sequence_newer(7, 7));
}

TEST(Expiry, StaleNeighboursLeaveRouting) {
  OlsrAgent a(NodeId(0), 4, OlsrParams{});
  a.process_hello(hello_from(1, {10, 0}, 6.0, {{kSymSym, NodeId(0)}}), {0, 0}, 0.0);
  EXPECT_TRUE(a.routing_table(5.0).contains(NodeId(1)));
  EXPECT_FALSE(a.routing_table(6.5).contains(NodeId(1)));
  EXPECT_EQ(a.graph(6.5).link_count(), 0u);
}

TEST(Dijkstra, SquareTieBrokenByLength) {
  // A(0) B(1) C(2) D(3): A-B-C shorter than A-D-C
  Graph g(4);
  g.add_link(id(0), id(1), 10);
  g.add_link(id(1), id(2), 10);
  g.add_link(id(2), id(3), 15);
  g.add_link(id(3), id(0), 15);
  const auto t = compute_routes_dijkstra(g, id(0));
  EXPECT_EQ(t.at(id(2)).hop_count, 2u);
  EXPECT_EQ(t.at(id(2)).next_hop, id(1));
  EXPECT_DOUBLE_EQ(t.at(id(2)).length, 20.0);
  EXPECT_EQ(t.at(id(3)).next_hop, id(3));
  EXPECT_EQ(t.at(id(3)).hop_count, 1u);
}

TEST(Dijkstra, EqualLengthTieGoesToLowerNextHop) {
  Graph g(4);
  g.add_link(id(0), id(2), 10);
  g.add_link(id(2), id(3), 10);
  g.add_link(id(0), id(1), 10);
  g.add_link(id(1), id(3), 10);
  EXPECT_EQ(compute_routes_dijkstra(g, id(0)).at(id(3)).next_hop, id(1));
}

TEST(Dijkstra, PartitionLeavesNoEntry) {
  Graph g(4);
  g.add_link(id(0), id(1), 1);
  g.add_link(id(2), id(3), 1);
  const auto t = compute_routes_dijkstra(g, id(0));
  EXPECT_TRUE(t.contains(id(1)));
  EXPECT_FALSE(t.contains(id(2)));
  EXPECT_FALSE(t.contains(id(3)));
}

TEST(Dijkstra, HopCountsMatchBfs) {
  Rng rng = make_stream(55, StreamKind::placement);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + uniform_index(rng, 9);
    const auto rg = oracle::random_graph(rng, n, 0.3, true);
    for (std::size_t s = 0; s < n; ++s) {
      const auto bfs = oracle::bfs_hops(rg.graph, id(s));
      const auto t = compute_routes_dijkstra(rg.graph, id(s));
      for (std::size_t d = 0; d < n; ++d) {
        if (d == s) continue;
        ASSERT_TRUE(bfs[d]);
        ASSERT_EQ(t.at(id(d)).hop_count, *bfs[d]);
        ASSERT_TRUE(rg.graph.has_link(id(s), t.at(id(d)).next_hop));
      }
    }
  }
}

TEST(ShortestRoute, MatchesTableEntry) {
  Graph g(4);
  g.add_link(id(0), id(1), 3);
  g.add_link(id(1), id(2), 4);
  g.add_link(id(2), id(3), 5);
  EnergyTable e{{1, 2, 3, 4}, 10};
  const auto r = shortest_route(g, id(0), id(3), e);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->nodes, (std::vector<NodeId>{id(0), id(1), id(2), id(3)}));
  EXPECT_DOUBLE_EQ(r->length, 12.0);
  EXPECT_DOUBLE_EQ(r->intermediate_energy, 5.0);
  EXPECT_FALSE(shortest_route(g, id(0), id(0), e));
}

TEST(Flooding, TopologyConvergesToEveryAdvertisedLink) {
  Rng rng = make_stream(8, StreamKind::placement);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 10;
    const auto rg = oracle::random_graph(rng, n, 0.15, true);
    auto agents = converge_hellos(rg.graph, rg.positions, 0.0, 5);

    // Global-knowledge oracle: every TC goes everywhere.
    std::vector<std::set<std::pair<NodeId, NodeId>>> expected(n);
    std::deque<std::tuple<NodeId, NodeId, TcMessage>> air;
    std::vector<std::size_t> forwards(n, 0);
    for (std::size_t o = 0; o < n; ++o) {
      // MPR coverage holds on the converged tables
      const auto& t = agents[o].neighbors();
      for (const auto& [far, via] : t.two_hop) {
        bool covered = false;
        for (NodeId v : via) covered = covered || t.mpr_set.contains(v);
        ASSERT_TRUE(covered);
      }
      const auto tc = agents[o].emit_tc(rg.positions[o], 10.0, 5.0);
      if (!tc) continue;
      for (std::size_t v = 0; v < n; ++v)
        if (v != o)
          for (const auto& a : tc->advertised) expected[v].insert({id(o), a.neighbor});
      for (const auto& e : rg.graph.neighbors(id(o))) air.emplace_back(e.to, id(o), *tc);
    }
    while (!air.empty()) {
      auto [rx, tx, msg] = air.front();
      air.pop_front();
      if (agents[rx.index()].process_tc(msg, tx, 5.0).forward) {
        ASSERT_LE(++forwards[msg.header.originator.index()], n);
        msg.header.ttl--;
        msg.header.hop_count++;
        for (const auto& e : rg.graph.neighbors(rx)) air.emplace_back(e.to, rx, msg);
      }
    }
    for (std::size_t v = 0; v < n; ++v) {
      std::set<std::pair<NodeId, NodeId>> got;
      for (const auto& [key, entry] : agents[v].topology()) got.insert(key);
      ASSERT_EQ(got, expected[v]) << "node " << v << " trial " << trial;
    }
    // With full topology every node reaches every other
    for (std::size_t v = 0; v < n; ++v) ASSERT_EQ(agents[v].routing_table(5.0).size(), n - 1);
  }
}

TEST(EnergyView, SelfExactOthersAsAdvertised) {
  OlsrAgent a(NodeId(0), 4, OlsrParams{});
  a.process_hello(hello_from(1, {10, 0}, 6.0, {{kSymSym, NodeId(0)}}), {0, 0}, 0.0);
  a.process_hello(hello_from(1, {10, 0}, 5.5, {{kSymSym, NodeId(0)}}), {0, 0}, 1.0);
  const auto e = a.energy_view(9.25, 10.0);
  EXPECT_DOUBLE_EQ(e.joules(NodeId(0)), 9.25);
  EXPECT_DOUBLE_EQ(e.joules(NodeId(1)), 5.5);
  EXPECT_DOUBLE_EQ(e.joules(NodeId(3)), 0.0);
}
