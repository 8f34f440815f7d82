#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "sgchurn/engine.hpp"
#include "sgchurn/errors.hpp"

using namespace sgchurn;
namespace t = sgchurn::testing;

namespace {

SimConfig quiet_config() {
  SimConfig c;
  c.capacity = 16;
  c.slots = 4;
  c.topologies = 1;
  c.backupSize = 10;
  c.churn.interarrivalMeanSeconds = std::numeric_limits<double>::infinity();
  return c;
}

void all_online(Simulation& sim) {
  for (std::size_t i = 0; i < sim.topology().size(); ++i) sim.bring_online(address_at(i), 1000);
}

NodeAddress by_num(const Topology& topo, NumId num) {
  for (std::size_t i = 0; i < topo.size(); ++i) {
    if (topo.node(address_at(i)).numId == num) return address_at(i);
  }
  throw std::logic_error("no such numId");
}

// Latency rebuilt from the path and resolve records.
double recomputed_latency(const Simulation& sim, const SearchOutcome& o) {
  const auto& topo = sim.topology();
  const auto& lat = sim.config().latency;
  const double tm = sim.config().timeoutMultiplier;
  double total = 0.0;
  for (std::size_t i = 1; i < o.path.size(); ++i) total += lat.rtt(topo.node(o.path[i - 1]), topo.node(o.path[i]));
  for (const auto& r : o.resolves) {
    total += tm * lat.rtt(topo.node(r.executor), topo.node(r.failed.address));
    for (const auto& c : r.contacts) {
      if (!c.online) total += tm * lat.rtt(topo.node(r.executor), topo.node(c.address));
    }
  }
  return total;
}

}  // namespace

TEST(Rtt, BaseSymmetricAndLocal) {
  const LatencyModel m{10.0, 190.0};
  NodeIdentity a;
  NodeIdentity b;
  a.coords = {0.2, 0.3};
  b.coords = {0.2, 0.3};
  EXPECT_DOUBLE_EQ(m.rtt(a, b), 10.0);
  b.coords = {0.5, 0.7};
  EXPECT_DOUBLE_EQ(m.rtt(a, b), m.rtt(b, a));
  EXPECT_NEAR(m.rtt(a, b), 10.0 + 190.0 * 0.5, 1e-12);
}

TEST(Rtt, MeanNonIncreasingInPrefixLength) {
  const auto snap = generate_topology(1024, 8);
  const LatencyModel m;
  std::map<unsigned, std::pair<double, std::size_t>> buckets;
  for (std::size_t i = 0; i < snap.nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < snap.nodes.size(); ++j) {
      auto& b = buckets[common_prefix_length(snap.nodes[i].nameId, snap.nodes[j].nameId)];
      b.first += m.rtt(snap.nodes[i], snap.nodes[j]);
      ++b.second;
    }
  }
  double last = std::numeric_limits<double>::infinity();
  for (const auto& [cpl, b] : buckets) {
    const double mean = b.first / static_cast<double>(b.second);
    EXPECT_LE(mean, last) << "cpl " << cpl;
    last = mean;
  }
}

TEST(RunSearch, SampleGraphAllOnline) {
  SimConfig c = quiet_config();
  Simulation sim(c, t::sample_skip_graph(), 1);
  all_online(sim);
  const auto o = sim.run_search(by_num(sim.topology(), 41), 2);
  EXPECT_TRUE(o.success);
  EXPECT_EQ(sim.topology().node(o.result).numId, 2U);
  EXPECT_EQ(o.resolveInvocations, 0U);
  EXPECT_NEAR(o.latencyMs, recomputed_latency(sim, o), 1e-9);
  EXPECT_GT(o.latencyMs, 0.0);
}

// 41 reaches 43 only through its level-0 link; higher levels overshoot to 51.
TEST(RunSearch, NoStabilizerFailsAtLevelZero) {
  SimConfig c = quiet_config();
  c.stabilizer = StabilizerKind::None;
  Simulation sim(c, t::sample_skip_graph(), 1);
  all_online(sim);
  const NodeAddress from = by_num(sim.topology(), 41);
  const NodeAddress gone = by_num(sim.topology(), 43);
  sim.take_offline(gone);
  const auto o = sim.run_search(from, 43);
  EXPECT_FALSE(o.success);
  EXPECT_EQ(o.result, from);
  ASSERT_EQ(o.resolveInvocations, 1U);
  EXPECT_EQ(o.resolveMessages, 0U);
  EXPECT_EQ(o.resolves[0].level, 0U);
  const double timeout = c.timeoutMultiplier * c.latency.rtt(sim.topology().node(from), sim.topology().node(gone));
  EXPECT_NEAR(o.latencyMs, timeout, 1e-9);
}

TEST(RunSearch, BackupEntriesRespectPlacement) {
  SimConfig c = quiet_config();
  c.stabilizer = StabilizerKind::Interlaced;
  Simulation sim(c, t::sample_skip_graph(), 1);
  all_online(sim);
  const auto& topo = sim.topology();
  for (std::size_t i = 0; i < topo.size(); ++i) {
    for (std::size_t j = 0; j < topo.size(); ++j) {
      if (i != j) ASSERT_TRUE(sim.run_search(address_at(i), topo.node(address_at(j)).numId).success);
    }
  }
  std::size_t stored = 0;
  for (std::size_t i = 0; i < topo.size(); ++i) {
    const auto& owner = topo.node(address_at(i));
    const auto* bt = sim.node(address_at(i)).stabilizer.backup_table();
    ASSERT_NE(bt, nullptr);
    EXPECT_LE(bt->size(), c.backupSize);
    stored += bt->size();
    for (std::size_t l = 0; l < bt->levels(); ++l) {
      for (Direction d : {Direction::Left, Direction::Right}) {
        for (const auto& e : bt->set(l, d)) {
          EXPECT_NE(e.numId, owner.numId);
          EXPECT_FALSE(sim.node(address_at(i)).lookup.contains(e.numId));
          EXPECT_EQ(backup_level(owner.nameId, e.nameId, bt->levels()), l);
          EXPECT_EQ(direction_towards(owner.numId, e.numId), d);
        }
      }
    }
  }
  EXPECT_GT(stored, 0U);
}

TEST(RunSlot, SingleOnlineNodeHasNoSearches) {
  SimConfig c = quiet_config();
  Simulation sim(c, t::sample_skip_graph(), 3);
  sim.bring_online(address_at(0), 10);
  for (int s = 0; s < 5; ++s) {
    const auto m = sim.run_slot();
    EXPECT_EQ(m.onlineCount, 1U);
    EXPECT_EQ(m.searchesInitiated, 0U);
    EXPECT_EQ(m.predictionSamples, sim.topology().size());
  }
}

TEST(RunSlot, SearchCountWithinBounds) {
  SimConfig c;
  c.capacity = 64;
  c.slots = 30;
  c.searchCap = 700;
  Simulation sim(c, generate_topology(64, 2), 2);
  for (int s = 0; s < 30; ++s) {
    const auto m = sim.run_slot();
    EXPECT_LE(m.searchesInitiated, m.onlineCount * (m.onlineCount - 1) / 2);
    EXPECT_LE(m.searchesInitiated, 700U);
    EXPECT_LE(m.searchesSucceeded, m.searchesInitiated);
    EXPECT_EQ(m.predictionSamples, 64U);
  }
}

TEST(RunSlot, NoChurnAllSearchesSucceed) {
  SimConfig c;
  c.capacity = 128;
  c.churn.kind = ChurnKind::Uniform;
  c.churn.uniformQ = 0.0;
  c.searchCap = std::nullopt;
  Simulation sim(c, generate_topology(128, 4), 4);
  std::size_t searches = 0;
  for (int s = 0; s < 3; ++s) {
    const auto m = sim.run_slot();
    EXPECT_EQ(m.onlineCount, 128U);
    EXPECT_EQ(m.searchesSucceeded, m.searchesInitiated);
    EXPECT_EQ(m.resolveInvocations, 0U);
    searches += m.searchesInitiated;
  }
  EXPECT_GT(searches, 0U);
}

TEST(RunSearch, ChurnedSearchesKeepInvariants) {
  for (auto kind : {StabilizerKind::Interlaced, StabilizerKind::Kademlia, StabilizerKind::Dks, StabilizerKind::None}) {
    SimConfig c;
    c.capacity = 128;
    c.stabilizer = kind;
    c.backupSize = 30;
    c.churn.interarrivalMeanSeconds = 3600.0 / 30.0;
    Simulation sim(c, generate_topology(128, 6), 6);
    std::mt19937_64 rng(6);
    for (int s = 0; s < 12; ++s) {
      sim.run_slot();
      const auto& on = sim.online();
      if (on.size() < 2) continue;
      for (int k = 0; k < 100; ++k) {
        const NodeAddress from = on.at(rng() % on.size());
        const NumId target = sim.topology().node(on.at(rng() % on.size())).numId;
        const auto o = sim.run_search(from, target);
        EXPECT_NEAR(o.latencyMs, recomputed_latency(sim, o), 1e-6);
        if (o.success) {
          EXPECT_TRUE(on.contains(o.result));
          EXPECT_EQ(sim.topology().node(o.result).numId, target);
        }
        for (std::size_t i = 1; i < o.resolves.size(); ++i) EXPECT_LE(o.resolves[i].level, o.resolves[i - 1].level);
        for (const auto& r : o.resolves) {
          if (r.result) {
            EXPECT_TRUE(r.contacts.back().online);
          }
          for (const auto& ct : r.contacts) EXPECT_EQ(ct.online, on.contains(ct.address));
        }
        for (NodeAddress a : o.path) EXPECT_TRUE(on.contains(a));
        if (kind == StabilizerKind::None) {
          EXPECT_EQ(o.resolveMessages, 0U);
        }
      }
    }
  }
}

TEST(RunSlot, OfflineReplayFeedsZeros) {
  SimConfig c = quiet_config();
  c.predictor = PredictorKind::Dbg2;
  Simulation sim(c, t::sample_skip_graph(), 5);
  const NodeAddress a = address_at(3);
  sim.bring_online(address_at(0), 100);
  sim.bring_online(a, 2);
  sim.run_slot();
  sim.run_slot();
  EXPECT_FALSE(sim.online().contains(a));
  sim.run_slot();
  sim.run_slot();
  sim.run_slot();
  sim.bring_online(a, 1);
  sim.run_slot();
  Dbg reference(2);
  double v = 0.0;
  for (int b : {1, 1, 0, 0, 0, 1}) v = reference.update(b != 0);
  EXPECT_DOUBLE_EQ(sim.sop_of(a), v);
  EXPECT_EQ(sim.node(a).predictor.kind(), PredictorKind::Dbg2);
}

TEST(RunSlot, StaleRejoinKeepsOldTable) {
  SimConfig c = quiet_config();
  c.rejoin = RejoinMode::Stale;
  Simulation sim(c, t::sample_skip_graph(), 5);
  const NodeAddress a = address_at(6);
  all_online(sim);
  const LookupTable before = sim.node(a).lookup;
  sim.take_offline(a);
  sim.take_offline(by_num(sim.topology(), 41));
  sim.bring_online(a, 3);
  EXPECT_EQ(sim.node(a).lookup, before);
}

TEST(RunTopology, DeterministicAndAggregates) {
  SimConfig c;
  c.capacity = 64;
  c.slots = 12;
  c.searchCap = 200;
  const auto a = run_topology(c, 0);
  const auto b = run_topology(c, 0);
  ASSERT_EQ(a.perSlot.size(), 12U);
  EXPECT_EQ(a.totals.searchesInitiated, b.totals.searchesInitiated);
  EXPECT_EQ(a.totals.searchesSucceeded, b.totals.searchesSucceeded);
  EXPECT_EQ(a.avgSearchLatencyMs, b.avgSearchLatencyMs);
  EXPECT_EQ(a.avgPredictionError, b.avgPredictionError);

  const auto same = aggregate({a, a});
  EXPECT_DOUBLE_EQ(same.avgSuccessRatio, a.avgSuccessRatio);
  EXPECT_DOUBLE_EQ(same.avgSearchLatencyMs, a.avgSearchLatencyMs);
  EXPECT_DOUBLE_EQ(same.avgPredictionError, a.avgPredictionError);
  EXPECT_DOUBLE_EQ(same.sdSuccessRatio, 0.0);
  EXPECT_EQ(same.topologies, 2U);

  const auto other = run_topology(c, 1);
  const auto both = aggregate({a, other});
  const double succ = static_cast<double>(a.totals.searchesSucceeded + other.totals.searchesSucceeded);
  const double init = static_cast<double>(a.totals.searchesInitiated + other.totals.searchesInitiated);
  EXPECT_DOUBLE_EQ(both.avgSuccessRatio, succ / init);
}

TEST(RunTopology, ChurnIndependentOfStrategy) {
  SimConfig c;
  c.capacity = 64;
  c.slots = 10;
  c.searchCap = 100;
  auto online_series = [](const RunMetrics& m) {
    std::vector<std::size_t> v;
    for (const auto& s : m.perSlot) v.push_back(s.onlineCount);
    return v;
  };
  const auto base = online_series(run_topology(c, 3));
  c.stabilizer = StabilizerKind::Dks;
  c.predictor = PredictorKind::Lifetime;
  EXPECT_EQ(online_series(run_topology(c, 3)), base);
}

TEST(RunTopology, TraceLines) {
  SimConfig c;
  c.capacity = 32;
  c.slots = 3;
  c.searchCap = 20;
  std::stringstream trace;
  const auto m = run_topology(c, 2, &trace);
  std::size_t lines = 0;
  for (std::string line; std::getline(trace, line);) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_EQ(j.at("topology").get<std::size_t>(), 2U);
    EXPECT_TRUE(j.contains("hops"));
    ++lines;
  }
  EXPECT_EQ(lines, m.totals.searchesInitiated);
}

TEST(SimConfig, Validation) {
  SimConfig c;
  c.capacity = 100;
  EXPECT_THROW(c.validate(), ConfigError);
  c = SimConfig{};
  c.slots = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = SimConfig{};
  c.swDbg.maxStateSize = 2;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_NO_THROW(SimConfig{}.validate());
}
