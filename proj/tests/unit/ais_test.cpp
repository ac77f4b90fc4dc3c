#include <gtest/gtest.h>

#include <limits>
#include <stdexcept>
#include <vector>

#include "aisolsr/ais.hpp"
#include "aisolsr/olsr.hpp"
#include "oracles.hpp"

using namespace aisolsr;
using oracle::id;

namespace {

std::vector<NodeId> seq(std::initializer_list<std::uint32_t> v) {
  std::vector<NodeId> out;
  for (auto x : v) out.push_back(NodeId(x));
  return out;
}

Route route(std::initializer_list<std::uint32_t> nodes, double length = 0.0) {
  Route r;
  r.nodes = seq(nodes);
  r.length = length;
  return r;
}

// The diamond used across tests and the acceptance suite:
// S0-A1-D2 (A at 0.3), S0-B3-C4-D2 (B, C at 0.8 / 0.9).
Graph diamond_graph() {
  Graph g(5);
  g.add_link(id(0), id(1), 244.1);
  g.add_link(id(1), id(2), 244.1);
  g.add_link(id(0), id(3), 141.4);
  g.add_link(id(3), id(4), 200.0);
  g.add_link(id(4), id(2), 141.4);
  return g;
}

EnergyTable diamond_energy() { return EnergyTable{{10.0, 3.0, 10.0, 8.0, 9.0}, 10.0}; }

}  // namespace

TEST(Enumerate, TriangleIsExhaustive) {
  Graph g(3);
  g.add_link(id(0), id(1), 1);
  g.add_link(id(1), id(2), 1);
  g.add_link(id(0), id(2), 1);
  const auto r = enumerate_candidate_routes(g, id(0), id(2), 10, 5, EnergyTable{{1, 1, 1}, 1});
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].nodes, seq({0, 2}));
  EXPECT_EQ(r[1].nodes, seq({0, 1, 2}));
}

TEST(Enumerate, PartitionGivesNothing) {
  Graph g(4);
  g.add_link(id(0), id(1), 1);
  g.add_link(id(2), id(3), 1);
  EXPECT_TRUE(enumerate_candidate_routes(g, id(0), id(3), 10, 5, EnergyTable{{1, 1, 1, 1}, 1}).empty());
}

TEST(Enumerate, SameEndpointsRejected) {
  Graph g(2);
  EXPECT_THROW(enumerate_candidate_routes(g, id(1), id(1), 4, 4, EnergyTable{{1, 1}, 1}), std::invalid_argument);
}

TEST(Enumerate, HopBoundExcludesLongPaths) {
  const auto r = enumerate_candidate_routes(diamond_graph(), id(0), id(2), 10, 2, diamond_energy());
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].nodes, seq({0, 1, 2}));
}

TEST(Enumerate, EqualsKBestOfAllSimplePaths) {
  Rng rng = make_stream(42, StreamKind::placement);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + uniform_index(rng, 8);
    const auto rg = oracle::random_graph(rng, n, 0.35, true);
    EnergyTable e{std::vector<double>(n), 10.0};
    for (auto& x : e.remaining) x = uniform(rng, 0, 10);
    const NodeId s = id(uniform_index(rng, n));
    NodeId d = s;
    while (d == s) d = id(uniform_index(rng, n));
    const std::size_t k = 1 + uniform_index(rng, 12);
    const std::size_t h = 1 + uniform_index(rng, n);
    const auto got = enumerate_candidate_routes(rg.graph, s, d, k, h, e);
    const auto want = oracle::k_best_paths(rg.graph, s, d, k, h, e);
    ASSERT_EQ(got.size(), want.size()) << "trial " << trial;
    for (std::size_t i = 0; i < got.size(); ++i) {
      ASSERT_EQ(got[i].nodes, want[i].nodes) << "trial " << trial << " rank " << i;
      ASSERT_NEAR(got[i].length, want[i].length, 1e-9);
      ASSERT_NEAR(got[i].intermediate_energy, want[i].intermediate_energy, 1e-9);
    }
  }
}

TEST(EnergyTest, DirectRoutePassesVacuously) {
  EnergyTable e{{0, 0}, 10};
  EXPECT_TRUE(passes_energy_test(route({0, 1}), 1.0, e));
}

TEST(EnergyTest, StrictlyBelowFloorFails) {
  EnergyTable e{{10, 5, 10}, 10};
  EXPECT_TRUE(passes_energy_test(route({0, 1, 2}), 0.5, e));
  e.remaining[1] = 4.999;
  EXPECT_FALSE(passes_energy_test(route({0, 1, 2}), 0.5, e));
}

TEST(NegativeSelection, FourRouteExampleKeepsFewestHopSurvivors) {
  // R1 2 hops via a 0.3 node; R2 3 hops min 0.8; R3 5 hops min 0.9; R4 4 hops min 0.6
  EnergyTable e{std::vector<double>(20, 10.0), 10.0};
  e.remaining[1] = 3.0;
  e.remaining[2] = 8.0;
  e.remaining[3] = 8.5;
  e.remaining[4] = 9.0;
  e.remaining[5] = 9.5;
  e.remaining[6] = 9.2;
  e.remaining[7] = 9.1;
  e.remaining[8] = 6.0;
  e.remaining[10] = 7.0;
  e.remaining[11] = 9.9;
  const Route r1 = route({0, 1, 19}, 100);
  const Route r2 = route({0, 2, 3, 19}, 150);
  const Route r3 = route({0, 4, 5, 6, 7, 19}, 250);
  const Route r4 = route({0, 8, 10, 11, 19}, 200);
  const std::vector<Route> cands{r1, r2, r3, r4};
  const auto set = negative_selection_filter(cands, AntigenCriteria{0.5, 2}, e);
  ASSERT_EQ(set.size(), 2u);
  EXPECT_EQ(set.routes()[0], r2);
  EXPECT_EQ(set.routes()[1], r4);
  const auto want = oracle::filter_then_sort(cands, 0.5, 2, e);
  EXPECT_EQ(std::vector<Route>(set.routes().begin(), set.routes().end()), want);
}

TEST(NegativeSelection, AllBelowFloorGivesEmptySet) {
  EnergyTable e{{10, 1, 2, 10}, 10};
  const std::vector<Route> cands{route({0, 1, 3}), route({0, 2, 3})};
  EXPECT_TRUE(negative_selection_filter(cands, AntigenCriteria{0.5, 4}, e).empty());
}

TEST(NegativeSelection, FloorZeroRejectsNothing) {
  Rng rng = make_stream(12, StreamKind::placement);
  for (int trial = 0; trial < 200; ++trial) {
    const auto rg = oracle::random_graph(rng, 8, 0.4, true);
    EnergyTable e{std::vector<double>(8), 10.0};
    for (auto& x : e.remaining) x = uniform(rng, 0, 10);
    const auto cands = enumerate_candidate_routes(rg.graph, id(0), id(7), 16, 7, e);
    const auto set = negative_selection_filter(cands, AntigenCriteria{0.0, 64}, e);
    ASSERT_EQ(set.size(), cands.size());
    ASSERT_EQ(oracle::filter_then_sort(cands, 0.0, 64, e).size(), cands.size());
  }
}

TEST(DetectionSet, EvictsWorstOnlyForBetterNewcomer) {
  DetectionSet set(2);
  EXPECT_TRUE(set.offer(route({0, 1, 2, 9}, 10)));
  EXPECT_TRUE(set.offer(route({0, 3, 4, 5, 9}, 10)));
  EXPECT_FALSE(set.offer(route({0, 6, 7, 8, 1, 9}, 1)));
  EXPECT_TRUE(set.offer(route({0, 5, 9}, 99)));
  ASSERT_EQ(set.size(), 2u);
  EXPECT_EQ(set.routes()[0].nodes, seq({0, 5, 9}));
  EXPECT_EQ(set.routes()[1].nodes, seq({0, 1, 2, 9}));
}

TEST(Affinity, Examples) {
  EnergyTable e{{0, 3, 4, 5, 0, 8}, 10};
  EXPECT_DOUBLE_EQ(affinity(route({0, 1, 2, 3, 4}), e), 3.0);
  EXPECT_DOUBLE_EQ(affinity(route({0, 5, 4}), e), 4.0);
  EXPECT_THROW(affinity(route({0, 4}), e), std::invalid_argument);
}

TEST(Affinity, LinearInEnergy) {
  EnergyTable e{{1, 2.5, 7.25, 3}, 10};
  const Route r = route({0, 1, 2, 3});
  for (double c : {0.5, 2.0, 8.0}) {
    EnergyTable s = e;
    for (auto& x : s.remaining) x *= c;
    EXPECT_DOUBLE_EQ(affinity(r, s), c * affinity(r, e));
  }
}

namespace {

// Two 2-hop routes through nodes 1 and 2 with chosen affinities (energy / 2).
DetectionSet two_route_set(double len1, double len2) {
  DetectionSet set(4);
  set.offer(route({0, 1, 9}, len1));
  set.offer(route({0, 2, 9}, len2));
  return set;
}

}  // namespace

TEST(Clonalg, DominantAffinityWinsWithoutMutation) {
  EnergyTable e{std::vector<double>(10, 10.0), 10.0};
  e.remaining[1] = 8.0;  // affinity 4.0
  e.remaining[2] = 4.0;  // affinity 2.0
  const auto set = two_route_set(300, 250);
  const auto got = clonalg_select(set, ClonalgParams{2, 0.05, 64, 8}, e);
  ASSERT_TRUE(got);
  EXPECT_EQ(got->nodes, seq({0, 1, 9}));
  EXPECT_EQ(got, oracle::reference_select({set.routes().begin(), set.routes().end()}, 2, 0.05, e));
}

TEST(Clonalg, CloseAffinitiesMutateToShortest) {
  EnergyTable e{std::vector<double>(10, 10.0), 10.0};
  e.remaining[1] = 8.0;  // affinity 4.0
  e.remaining[2] = 7.8;  // affinity 3.9
  const auto set = two_route_set(300, 250);
  const auto got = clonalg_select(set, ClonalgParams{2, 0.05, 64, 8}, e);
  ASSERT_TRUE(got);
  EXPECT_EQ(got->nodes, seq({0, 2, 9}));
  EXPECT_EQ(got, oracle::reference_select({set.routes().begin(), set.routes().end()}, 2, 0.05, e));
}

TEST(Clonalg, EmptySetGivesNothing) {
  EXPECT_FALSE(clonalg_select(DetectionSet(3), ClonalgParams{}, EnergyTable{{1}, 1}));
}

TEST(Clonalg, DirectRouteWinsOutright) {
  DetectionSet set(4);
  set.offer(route({0, 9}, 240));
  set.offer(route({0, 1, 9}, 10));
  EnergyTable e{std::vector<double>(10, 10.0), 10.0};
  EXPECT_EQ(clonalg_select(set, ClonalgParams{}, e)->nodes, seq({0, 9}));
}

TEST(Clonalg, MatchesReferenceRuleOnRandomSets) {
  Rng rng = make_stream(31, StreamKind::placement);
  for (int trial = 0; trial < 2000; ++trial) {
    EnergyTable e{std::vector<double>(16), 10.0};
    for (auto& x : e.remaining) x = uniform01(rng) < 0.2 ? 5.0 : uniform(rng, 0, 10);
    DetectionSet set(1 + uniform_index(rng, 6));
    const std::size_t count = uniform_index(rng, 8);
    for (std::size_t i = 0; i < count; ++i) {
      Route r;
      r.nodes.push_back(id(0));
      const std::size_t mids = 1 + uniform_index(rng, 4);
      std::vector<bool> used(16, false);
      while (r.nodes.size() < mids + 1) {
        const auto k = 1 + uniform_index(rng, 14);
        if (used[k]) continue;
        used[k] = true;
        r.nodes.push_back(id(k));
      }
      r.nodes.push_back(id(15));
      r.length = uniform01(rng) < 0.3 ? 100.0 : uniform(rng, 50, 500);
      set.offer(r);
    }
    const ClonalgParams p{1 + uniform_index(rng, 4), uniform01(rng) < 0.5 ? 0.05 : 0.5, 64, 8};
    const auto got = clonalg_select(set, p, e);
    const auto want = oracle::reference_select({set.routes().begin(), set.routes().end()}, p.top_n,
                                               p.dominance_margin, e);
    ASSERT_EQ(got, want) << "trial " << trial;
  }
}

TEST(ImmuneMemory, OverflowEvictsLowestAffinity) {
  ImmuneMemory m(3, 2);
  m.store(id(0), id(1), {route({0, 1}), 0, 0, std::numeric_limits<double>::infinity()});
  m.store(id(0), id(2), {route({0, 5, 2}), 0, 0, 1.0});
  m.store(id(0), id(3), {route({0, 5, 3}), 0, 0, 3.0});
  m.store(id(0), id(4), {route({0, 5, 4}), 0, 0, 2.0});
  EXPECT_EQ(m.size(), 2u);
  EXPECT_TRUE(m.find(id(0), id(1)));
  EXPECT_TRUE(m.find(id(0), id(3)));
  EXPECT_FALSE(m.find(id(0), id(2)));
  EXPECT_FALSE(m.find(id(0), id(4)));
}

TEST(AisRouter, DiamondPrefersHighEnergyDetour) {
  const Graph g = diamond_graph();
  const EnergyTable e = diamond_energy();
  AisRouter router(id(0), AisParams{});
  const auto d = router.route(id(2), g, e, 1, 0.0);
  ASSERT_TRUE(d);
  EXPECT_EQ(d->origin, RouteOrigin::pipeline);
  EXPECT_EQ(d->route.nodes, seq({0, 3, 4, 2}));
  EXPECT_EQ(shortest_route(g, id(0), id(2), e)->nodes, seq({0, 1, 2}));
}

TEST(AisRouter, WarmMemorySkipsPipeline) {
  const Graph g = diamond_graph();
  const EnergyTable e = diamond_energy();
  AisRouter router(id(0), AisParams{});
  router.route(id(2), g, e, 1, 0.0);
  const auto again = router.route(id(2), g, e, 1, 1.0);
  EXPECT_EQ(again->origin, RouteOrigin::memory);
  EXPECT_EQ(router.stats().pipeline_runs, 1u);
  EXPECT_EQ(router.stats().memory_hits, 1u);
}

TEST(AisRouter, InvalidatedWhenOnRouteNodeDropsBelowFloor) {
  const Graph g = diamond_graph();
  EnergyTable e = diamond_energy();
  AisRouter router(id(0), AisParams{});
  router.route(id(2), g, e, 1, 0.0);
  e.remaining[3] = 4.0;
  const auto d = router.route(id(2), g, e, 2, 1.0);
  EXPECT_EQ(router.stats().invalidations, 1u);
  EXPECT_EQ(router.stats().pipeline_runs, 2u);
  EXPECT_EQ(router.stats().fallbacks, 1u);
  EXPECT_EQ(d->origin, RouteOrigin::shortest_path_fallback);
  EXPECT_EQ(d->route.nodes, seq({0, 1, 2}));
  EXPECT_FALSE(router.memory().find(id(0), id(2)));
}

TEST(AisRouter, InvalidatedWhenLinkDisappearsOrEntryAges) {
  const EnergyTable e = diamond_energy();
  AisRouter router(id(0), AisParams{});
  router.route(id(2), diamond_graph(), e, 1, 0.0);
  Graph broken(5);
  broken.add_link(id(0), id(1), 244.1);
  broken.add_link(id(1), id(2), 244.1);
  broken.add_link(id(0), id(3), 141.4);
  EXPECT_EQ(router.route(id(2), broken, e, 2, 1.0)->origin, RouteOrigin::shortest_path_fallback);
  EXPECT_EQ(router.stats().invalidations, 1u);

  AisRouter aging(id(0), AisParams{});
  aging.route(id(2), diamond_graph(), e, 1, 0.0);
  EXPECT_EQ(aging.route(id(2), diamond_graph(), e, 1, 10.0)->origin, RouteOrigin::memory);
  EXPECT_EQ(aging.route(id(2), diamond_graph(), e, 1, 20.5)->origin, RouteOrigin::pipeline);
}

TEST(AisRouter, UnreachableGivesNothing) {
  Graph g(3);
  g.add_link(id(0), id(1), 1);
  AisRouter router(id(0), AisParams{});
  EXPECT_FALSE(router.route(id(2), g, EnergyTable{{1, 1, 1}, 1}, 1, 0));
}

TEST(AisRouter, SelectedRoutesAlwaysMeetTheFloor) {
  Rng rng = make_stream(64, StreamKind::placement);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 4 + uniform_index(rng, 8);
    const auto rg = oracle::random_graph(rng, n, 0.3, true);
    EnergyTable e{std::vector<double>(n), 10.0};
    for (auto& x : e.remaining) x = uniform(rng, 0, 10);
    AisRouter router(id(0), AisParams{});
    for (std::size_t d = 1; d < n; ++d) {
      const auto got = router.route(id(d), rg.graph, e, 1, 0.0);
      ASSERT_TRUE(got);
      ASSERT_TRUE(is_loop_free(got->route.nodes));
      ASSERT_TRUE(rg.graph.contains_path(got->route.nodes));
      if (got->origin == RouteOrigin::pipeline) ASSERT_TRUE(passes_energy_test(got->route, 0.5, e));
    }
  }
}

TEST(Params, Validation) {
  EXPECT_THROW((ClonalgParams{0, 0.05, 64, 8}.validate()), std::invalid_argument);
  EXPECT_THROW((ClonalgParams{3, -0.1, 64, 8}.validate()), std::invalid_argument);
  AisParams p;
  p.max_candidates = 0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}
