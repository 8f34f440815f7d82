#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "sgchurn/errors.hpp"
#include "sgchurn/overlay.hpp"
#include "sgchurn/topology_json.hpp"

using namespace sgchurn;
namespace t = sgchurn::testing;

TEST(NameId, CommonPrefixLength) {
  EXPECT_EQ(common_prefix_length(NameId::from_string("0010"), NameId::from_string("0110")), 1U);
  EXPECT_EQ(common_prefix_length(NameId::from_string("0010"), NameId::from_string("0001")), 2U);
  EXPECT_EQ(common_prefix_length(NameId::from_string("1001"), NameId::from_string("1001")), 4U);
  EXPECT_THROW(common_prefix_length(NameId::from_string("10"), NameId::from_string("100")), std::invalid_argument);
}

TEST(NameId, RoundTripAndOrder) {
  const auto a = NameId::from_string("0110");
  EXPECT_EQ(a.to_string(), "0110");
  EXPECT_TRUE(a.bit(1));
  EXPECT_FALSE(a.bit(3));
  EXPECT_EQ(a.append(true).to_string(), "01101");
  EXPECT_LT(NameId::from_string("0011"), NameId::from_string("0100"));
  EXPECT_THROW(NameId::from_string("01x"), std::invalid_argument);
}

TEST(GenerateTopology, TwoNodesSplitAtFirstBit) {
  const auto s = generate_topology(2, 7);
  ASSERT_EQ(s.nodes.size(), 2U);
  EXPECT_NE(s.nodes[0].nameId.bit(0), s.nodes[1].nameId.bit(0));
  EXPECT_EQ(s.nodes[0].nameId.length(), 1U);
}

TEST(GenerateTopology, DefaultCapacity) {
  const auto s = generate_topology(1024, 3);
  EXPECT_EQ(s.nodes.size(), 1024U);
  std::vector<std::uint32_t> names;
  std::vector<NumId> nums;
  for (const auto& n : s.nodes) {
    EXPECT_EQ(n.nameId.length(), 10U);
    EXPECT_GE(n.coords.x, 0.0);
    EXPECT_LE(n.coords.x, 1.0);
    EXPECT_LT(n.numId, NumId{1} << 32);
    names.push_back(n.nameId.bits());
    nums.push_back(n.numId);
  }
  std::sort(names.begin(), names.end());
  std::sort(nums.begin(), nums.end());
  EXPECT_EQ(std::adjacent_find(names.begin(), names.end()), names.end());
  EXPECT_EQ(std::adjacent_find(nums.begin(), nums.end()), nums.end());
}

TEST(GenerateTopology, Deterministic) {
  EXPECT_EQ(generate_topology(64, 11), generate_topology(64, 11));
  EXPECT_NE(generate_topology(64, 11), generate_topology(64, 12));
}

TEST(GenerateTopology, RejectsNonPowerOfTwo) {
  EXPECT_THROW(generate_topology(100, 1), ConfigError);
  EXPECT_THROW(generate_topology(1, 1), ConfigError);
  try {
    generate_topology(100, 1);
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("capacity must be a power of two"), std::string::npos);
  }
}

TEST(AssignNameIds, DuplicateCoordinatesBreakTiesByIndex) {
  std::vector<Coordinates> c(4, Coordinates{0.5, 0.5});
  const auto names = assign_name_ids(c);
  EXPECT_EQ(names, assign_name_ids(c));
  std::vector<std::uint32_t> bits;
  for (const auto& n : names) bits.push_back(n.bits());
  std::sort(bits.begin(), bits.end());
  EXPECT_EQ(std::adjacent_find(bits.begin(), bits.end()), bits.end());
}

TEST(AssignNameIds, FirstBitSplitsOnX) {
  const std::vector<Coordinates> c = {{0.9, 0.1}, {0.1, 0.9}, {0.8, 0.8}, {0.2, 0.2}};
  const auto names = assign_name_ids(c);
  EXPECT_TRUE(names[0].bit(0));
  EXPECT_FALSE(names[1].bit(0));
  EXPECT_TRUE(names[2].bit(0));
  EXPECT_FALSE(names[3].bit(0));
}

TEST(JoinNode, OnlyJoinerOnlineGivesEmptyTable) {
  const Topology topo(t::sample_skip_graph());
  NodeSet online(topo.size());
  online.insert(address_at(6));
  const auto lt = join_node(topo, address_at(6), online);
  for (std::size_t l = 0; l < lt.levels(); ++l) {
    EXPECT_FALSE(lt.neighbor(l, Direction::Left));
    EXPECT_FALSE(lt.neighbor(l, Direction::Right));
  }
}

TEST(JoinNode, SampleGraphNode43) {
  const Topology topo(t::sample_skip_graph());
  NodeSet online(topo.size());
  for (std::size_t i = 0; i < topo.size(); ++i) online.insert(address_at(i));
  const auto lt = join_node(topo, address_at(6), online);
  EXPECT_EQ(lt.neighbor(0, Direction::Left)->numId, 41U);
  EXPECT_EQ(lt.neighbor(0, Direction::Right)->numId, 51U);
  EXPECT_EQ(lt.neighbor(1, Direction::Left)->numId, 21U);
  EXPECT_EQ(lt.neighbor(1, Direction::Right)->numId, 58U);
  EXPECT_EQ(lt.neighbor(2, Direction::Left)->numId, 21U);
  EXPECT_EQ(lt.neighbor(3, Direction::Left)->numId, 21U);
  EXPECT_FALSE(lt.neighbor(3, Direction::Right));
}

TEST(JoinNode, MatchesLinearScanOracle) {
  const auto snap = generate_topology(128, 5);
  const Topology topo(snap);
  std::mt19937_64 rng(9);
  std::vector<bool> flags(snap.nodes.size());
  NodeSet online(snap.nodes.size());
  for (std::size_t i = 0; i < flags.size(); ++i) {
    flags[i] = rng() % 3 != 0;
    if (flags[i]) online.insert(address_at(i));
  }
  for (std::size_t i = 0; i < flags.size(); ++i) {
    const auto lt = join_node(topo, address_at(i), online);
    EXPECT_EQ(lt, t::brute_force_join(snap, address_at(i), flags)) << "node " << i;
    const auto& me = snap.nodes[i];
    for (std::size_t l = 0; l < lt.levels(); ++l) {
      if (const auto& n = lt.neighbor(l, Direction::Left)) {
        EXPECT_LT(n->numId, me.numId);
        EXPECT_GE(common_prefix_length(n->nameId, me.nameId), l);
      }
      if (const auto& n = lt.neighbor(l, Direction::Right)) {
        EXPECT_GT(n->numId, me.numId);
        EXPECT_GE(common_prefix_length(n->nameId, me.nameId), l);
      }
    }
  }
}

namespace {

NumId walk(const Topology& topo, const NodeSet& online, NodeAddress start, NumId target) {
  std::vector<LookupTable> tables;
  for (std::size_t i = 0; i < topo.size(); ++i) tables.push_back(join_node(topo, address_at(i), online));
  SearchMessage msg;
  msg.targetNumId = target;
  msg.level = topo.levels() - 1;
  msg.direction = direction_towards(topo.node(start).numId, target);
  NodeAddress cur = start;
  for (int guard = 0; guard < 1000; ++guard) {
    const auto d = route_step(topo.node(cur), tables[to_index(cur)], msg);
    if (const auto* f = std::get_if<Forward>(&d)) {
      cur = f->next.address;
    } else if (const auto* s = std::get_if<Descend>(&d)) {
      EXPECT_LT(s->level, msg.level);
      msg.level = s->level;
    } else {
      return topo.node(cur).numId;
    }
  }
  ADD_FAILURE() << "route did not terminate";
  return 0;
}

}  // namespace

TEST(RouteStep, SampleGraphSearchFrom41For2) {
  const Topology topo(t::sample_skip_graph());
  NodeSet online(topo.size());
  for (std::size_t i = 0; i < topo.size(); ++i) online.insert(address_at(i));
  EXPECT_EQ(walk(topo, online, address_at(5), 2), 2U);
}

TEST(RouteStep, ExactHitTerminates) {
  const auto n = t::identity(0, 10, "01");
  SearchMessage msg;
  msg.targetNumId = 10;
  msg.level = 1;
  EXPECT_TRUE(std::holds_alternative<Terminate>(route_step(n, LookupTable(2), msg)));
}

TEST(RouteStep, NeverOvershoots) {
  const auto n = t::identity(0, 10, "01");
  LookupTable lt(2);
  lt.set_neighbor(1, Direction::Right, ref_of(t::identity(1, 30, "01")));
  lt.set_neighbor(0, Direction::Right, ref_of(t::identity(2, 15, "11")));
  SearchMessage msg;
  msg.targetNumId = 20;
  msg.level = 1;
  msg.direction = Direction::Right;
  auto d = route_step(n, lt, msg);
  ASSERT_TRUE(std::holds_alternative<Descend>(d));
  msg.level = 0;
  d = route_step(n, lt, msg);
  ASSERT_TRUE(std::holds_alternative<Forward>(d));
  EXPECT_EQ(std::get<Forward>(d).next.numId, 15U);
}

TEST(RouteStep, TargetBelowEveryNodeEndsAtLowest) {
  const Topology topo(t::sample_skip_graph());
  NodeSet online(topo.size());
  for (std::size_t i = 0; i < topo.size(); ++i) online.insert(address_at(i));
  EXPECT_EQ(walk(topo, online, address_at(6), 1), 2U);
}

TEST(RouteStep, RightwardSearchesMatchOracle) {
  const auto snap = generate_topology(64, 21);
  const Topology topo(snap);
  NodeSet online(topo.size());
  std::vector<NumId> nums;
  for (std::size_t i = 0; i < topo.size(); ++i) {
    if (i % 4 == 3) continue;
    online.insert(address_at(i));
    nums.push_back(snap.nodes[i].numId);
  }
  std::sort(nums.begin(), nums.end());
  std::mt19937_64 rng(1);
  for (int k = 0; k < 200; ++k) {
    const NodeAddress start = online.at(rng() % online.size());
    const NumId target = topo.node(start).numId + rng() % (NumId{1} << 30);
    EXPECT_EQ(walk(topo, online, start, target), t::brute_force_search_result(nums, target));
    EXPECT_EQ(ideal_search_oracle(nums, target), t::brute_force_search_result(nums, target));
  }
}

TEST(IdealSearchOracle, Cases) {
  const std::vector<NumId> v = {5, 9, 20};
  EXPECT_EQ(ideal_search_oracle(v, 9), 9U);
  EXPECT_EQ(ideal_search_oracle(v, 19), 9U);
  EXPECT_EQ(ideal_search_oracle(v, 1), 5U);
  EXPECT_EQ(ideal_search_oracle(v, 100), 20U);
  EXPECT_THROW(ideal_search_oracle(std::vector<NumId>{}, 1), std::invalid_argument);
}

TEST(SearchMessage, PiggybackNewestWins) {
  SearchMessage m;
  m.add_piggyback({address_at(1), 7, NameId::from_string("01"), 0.2});
  m.add_piggyback({address_at(2), 9, NameId::from_string("11"), 0.3});
  m.add_piggyback({address_at(1), 7, NameId::from_string("01"), 0.9});
  ASSERT_EQ(m.piggyback.size(), 2U);
  EXPECT_TRUE(m.visited(7));
  EXPECT_FALSE(m.visited(8));
  for (const auto& e : m.piggyback) {
    if (e.numId == 7) {
      EXPECT_DOUBLE_EQ(e.sop, 0.9);
    }
  }
}

TEST(TopologyJson, RoundTrip) {
  const auto s = generate_topology(32, 4);
  EXPECT_EQ(topology_from_json(topology_to_json(s)), s);
  const auto dumped = topology_to_json(s).dump();
  EXPECT_EQ(topology_from_json(nlohmann::json::parse(dumped)), s);
}

TEST(NodeSet, InsertEraseContains) {
  NodeSet s(5);
  EXPECT_TRUE(s.insert(address_at(3)));
  EXPECT_FALSE(s.insert(address_at(3)));
  EXPECT_TRUE(s.insert(address_at(1)));
  EXPECT_TRUE(s.erase(address_at(3)));
  EXPECT_FALSE(s.contains(address_at(3)));
  EXPECT_TRUE(s.contains(address_at(1)));
  EXPECT_EQ(s.size(), 1U);
}
