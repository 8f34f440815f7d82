#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sgchurn/churn.hpp"
#include "sgchurn/overlay.hpp"
#include "sgchurn/predictor.hpp"
#include "sgchurn/stabilizer.hpp"

namespace sgchurn {

enum class RejoinMode { Fresh, Stale };

RejoinMode parse_rejoin_mode(std::string_view name);
std::string to_string(RejoinMode mode);
PredErrorMode parse_pred_error_mode(std::string_view name);
std::string to_string(PredErrorMode mode);

struct LatencyModel {
  double rttBaseMs = 10.0;
  double rttPerUnitDistanceMs = 190.0;

  double rtt(const NodeIdentity& a, const NodeIdentity& b) const;
};

struct SimConfig {
  std::size_t capacity = 1024;
  std::size_t slots = 168;
  std::size_t topologies = 100;
  std::size_t backupSize = 40;
  StabilizerKind stabilizer = StabilizerKind::Interlaced;
  PredictorKind predictor = PredictorKind::SwDbg;
  double timeoutMultiplier = 2.0;
  LatencyModel latency;
  // nullopt: the uncapped draw over [0, C(n_o, 2)].
  std::optional<std::size_t> searchCap = 2000;
  std::uint64_t seed = 1;
  RejoinMode rejoin = RejoinMode::Fresh;
  SwDbgConfig swDbg;
  ChurnModel churn;

  // Throws ConfigError naming the offending key.
  void validate() const;
};

struct SlotMetrics {
  std::size_t slotIndex = 0;
  std::size_t onlineCount = 0;
  std::size_t searchesInitiated = 0;
  std::size_t searchesSucceeded = 0;
  double sumLatencyMs = 0.0;
  double sumPredictionError = 0.0;
  std::size_t predictionSamples = 0;
  std::size_t sumHops = 0;
  std::size_t resolveInvocations = 0;
  std::size_t resolveMessages = 0;
  // sum over online nodes of stabilizer size / levels
  double sumBackupPerLevel = 0.0;
  std::size_t backupSamples = 0;
  double sumRightStateSize = 0.0;
  std::size_t rightStateSamples = 0;

  SlotMetrics& operator+=(const SlotMetrics& o);
};

struct RunMetrics {
  std::size_t topologies = 0;
  // Index = slot; summed over topologies.
  std::vector<SlotMetrics> perSlot;
  SlotMetrics totals;

  double avgSuccessRatio = 0.0;
  double avgSearchLatencyMs = 0.0;
  double avgPredictionError = 0.0;
  double avgBackupNeighborsPerLevel = 0.0;
  double avgResolveMessages = 0.0;
  double avgRightStateSize = 0.0;
  double avgHops = 0.0;

  // Spread of the per-topology averages (sample standard deviation).
  double sdSuccessRatio = 0.0;
  double sdSearchLatencyMs = 0.0;
  double sdPredictionError = 0.0;
  std::vector<double> topologySuccessRatio;
  std::vector<double> topologySearchLatencyMs;
  std::vector<double> topologyPredictionError;
};

struct ResolveRecord {
  std::size_t level = 0;
  Direction direction = Direction::Right;
  NodeAddress executor{};
  // lookup neighbor whose timeout triggered the resolve
  NeighborRef failed;
  std::vector<Contact> contacts;
  std::optional<NeighborRef> result;
};

struct SearchOutcome {
  bool success = false;
  NodeAddress result{};
  double latencyMs = 0.0;
  std::size_t hops = 0;
  std::size_t resolveInvocations = 0;
  std::size_t resolveMessages = 0;
  std::vector<NodeAddress> path;
  std::vector<ResolveRecord> resolves;

  double messages_per_resolve() const {
    return resolveInvocations == 0 ? 0.0 : static_cast<double>(resolveMessages) / static_cast<double>(resolveInvocations);
  }
};

// One topology's slot loop. Churn and the search workload draw from separate
// streams, so churn is identical across stabilizer and predictor choices.
class Simulation {
 public:
  struct NodeState {
    LookupTable lookup;
    Stabilizer stabilizer;
    Predictor predictor;
    bool arrived = false;
    // First slot whose status has not been fed to the predictor yet.
    std::size_t nextStatusSlot = 0;
    std::size_t remainingSlots = 0;
  };

  Simulation(const SimConfig& config, TopologySnapshot snapshot, std::uint64_t streamSeed);

  const SimConfig& config() const { return config_; }
  const Topology& topology() const { return topology_; }
  const NodeSet& online() const { return online_; }
  const NodeState& node(NodeAddress a) const { return nodes_.at(to_index(a)); }
  std::size_t slot() const { return slot_; }

  SlotMetrics run_slot(std::ostream* trace = nullptr);
  SearchOutcome run_search(NodeAddress initiator, NumId target);

  // Test hooks. bring_online joins the node as an arrival of the current slot.
  void bring_online(NodeAddress a, std::size_t sessionSlots);
  void take_offline(NodeAddress a);

  double sop_of(NodeAddress a) const { return node(a).predictor.value(); }

  // Label written into trace lines.
  void set_topology_index(std::size_t i) { topologyIndex_ = i; }
  std::size_t topology_index() const { return topologyIndex_; }

 private:
  void arrive(NodeAddress a);
  void splice_into_neighbors(NodeAddress a);
  std::vector<std::size_t> incoming_connections() const;

  SimConfig config_;
  Topology topology_;
  std::vector<NodeState> nodes_;
  NodeSet online_;
  NodeSet offline_;
  Rng churnRng_;
  Rng workloadRng_;
  std::size_t slot_ = 0;
  std::size_t topologyIndex_ = 0;
};

// Deterministic per-topology seed derived from the experiment seed.
std::uint64_t topology_seed(std::uint64_t seed, std::size_t topologyIndex);

RunMetrics run_topology(const SimConfig& config, std::size_t topologyIndex, std::ostream* trace = nullptr);
RunMetrics aggregate(const std::vector<RunMetrics>& runs);
// Recomputes the averages of `m` from its totals and per-topology lists.
void finalize(RunMetrics& m);

// One NDJSON line for a search.
std::string search_trace_json(const Simulation& sim, std::size_t slot, NodeAddress initiator, NumId target,
                              const SearchOutcome& outcome);

}  // namespace sgchurn
