#include "sgchurn/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "sgchurn/errors.hpp"

namespace sgchurn {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Rng make_stream(std::uint64_t seed, std::uint32_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), tag};
  return Rng(seq);
}

double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

}  // namespace

RejoinMode parse_rejoin_mode(std::string_view name) {
  if (name == "fresh") return RejoinMode::Fresh;
  if (name == "stale") return RejoinMode::Stale;
  throw ConfigError("rejoin: unknown mode '" + std::string(name) + "' (expected fresh|stale)");
}

std::string to_string(RejoinMode mode) { return mode == RejoinMode::Fresh ? "fresh" : "stale"; }

PredErrorMode parse_pred_error_mode(std::string_view name) {
  if (name == "window") return PredErrorMode::Window;
  if (name == "instant") return PredErrorMode::Instant;
  throw ConfigError("pred-error: unknown mode '" + std::string(name) + "' (expected window|instant)");
}

std::string to_string(PredErrorMode mode) { return mode == PredErrorMode::Window ? "window" : "instant"; }

double LatencyModel::rtt(const NodeIdentity& a, const NodeIdentity& b) const {
  return rttBaseMs + rttPerUnitDistanceMs * std::hypot(a.coords.x - b.coords.x, a.coords.y - b.coords.y);
}

void SimConfig::validate() const {
  if (capacity < 2 || !is_power_of_two(capacity)) {
    throw ConfigError("capacity must be a power of two (got " + std::to_string(capacity) + ")");
  }
  if (capacity > (std::size_t{1} << NameId::kMaxLength)) throw ConfigError("capacity is too large");
  if (slots < 1) throw ConfigError("slots must be >= 1");
  if (topologies < 1) throw ConfigError("topologies must be >= 1");
  if (!(timeoutMultiplier > 0.0) || !std::isfinite(timeoutMultiplier)) {
    throw ConfigError("timeout-multiplier must be > 0");
  }
  if (!(latency.rttBaseMs >= 0.0) || !std::isfinite(latency.rttBaseMs)) throw ConfigError("rtt-base-ms must be >= 0");
  if (!(latency.rttPerUnitDistanceMs >= 0.0) || !std::isfinite(latency.rttPerUnitDistanceMs)) {
    throw ConfigError("rtt-per-unit-ms must be >= 0");
  }
  if (swDbg.maxStateSize < 3 || swDbg.maxStateSize > Dbg::kMaxStateSize) {
    throw ConfigError("max-state-size must lie in [3, " + std::to_string(Dbg::kMaxStateSize) + "]");
  }
  churn.validate();
}

SlotMetrics& SlotMetrics::operator+=(const SlotMetrics& o) {
  onlineCount += o.onlineCount;
  searchesInitiated += o.searchesInitiated;
  searchesSucceeded += o.searchesSucceeded;
  sumLatencyMs += o.sumLatencyMs;
  sumPredictionError += o.sumPredictionError;
  predictionSamples += o.predictionSamples;
  sumHops += o.sumHops;
  resolveInvocations += o.resolveInvocations;
  resolveMessages += o.resolveMessages;
  sumBackupPerLevel += o.sumBackupPerLevel;
  backupSamples += o.backupSamples;
  sumRightStateSize += o.sumRightStateSize;
  rightStateSamples += o.rightStateSamples;
  return *this;
}

Simulation::Simulation(const SimConfig& config, TopologySnapshot snapshot, std::uint64_t streamSeed)
    : config_(config),
      topology_(std::move(snapshot)),
      online_(topology_.size()),
      offline_(topology_.size()),
      churnRng_(make_stream(streamSeed, 1)),
      workloadRng_(make_stream(streamSeed, 2)) {
  nodes_.reserve(topology_.size());
  for (std::size_t i = 0; i < topology_.size(); ++i) {
    const NodeIdentity& id = topology_.node(address_at(i));
    nodes_.push_back(NodeState{LookupTable(topology_.levels()),
                               Stabilizer(config_.stabilizer, id, topology_.levels(), config_.backupSize),
                               Predictor(config_.predictor, config_.swDbg)});
    offline_.insert(address_at(i));
  }
}

void Simulation::splice_into_neighbors(NodeAddress a) {
  const NeighborRef self = ref_of(topology_.node(a));
  const LookupTable& lookup = nodes_[to_index(a)].lookup;
  for (std::size_t level = 0; level < lookup.levels(); ++level) {
    for (Direction dir : {Direction::Left, Direction::Right}) {
      const auto& n = lookup.neighbor(level, dir);
      if (!n) continue;
      NodeState& other = nodes_[to_index(n->address)];
      other.lookup.set_neighbor(level, opposite(dir), self);
      other.stabilizer.on_lookup_changed(other.lookup);
    }
  }
}

void Simulation::arrive(NodeAddress a) {
  NodeState& st = nodes_[to_index(a)];
  const bool returning = st.arrived;
  if (returning) {
    for (std::size_t s = st.nextStatusSlot; s < slot_; ++s) {
      st.predictor.update(false, PredictorContext{s, 0, topology_.size()});
    }
  }
  st.nextStatusSlot = slot_;
  st.arrived = true;
  offline_.erase(a);
  online_.insert(a);
  if (returning && config_.rejoin == RejoinMode::Stale) return;
  st.lookup = join_node(topology_, a, online_);
  splice_into_neighbors(a);
  st.stabilizer.on_join(topology_, st.lookup, online_);
}

void Simulation::bring_online(NodeAddress a, std::size_t sessionSlots) {
  if (online_.contains(a)) return;
  arrive(a);
  nodes_[to_index(a)].remainingSlots = std::max<std::size_t>(sessionSlots, 1);
}

void Simulation::take_offline(NodeAddress a) {
  if (!online_.contains(a)) return;
  online_.erase(a);
  offline_.insert(a);
  nodes_[to_index(a)].remainingSlots = 0;
}

std::vector<std::size_t> Simulation::incoming_connections() const {
  std::vector<std::size_t> in(topology_.size(), 0);
  std::vector<NodeAddress> seen;
  for (NodeAddress u : online_.members()) {
    seen.clear();
    const LookupTable& lt = nodes_[to_index(u)].lookup;
    for (std::size_t level = 0; level < lt.levels(); ++level) {
      for (Direction dir : {Direction::Left, Direction::Right}) {
        if (const auto& n = lt.neighbor(level, dir)) seen.push_back(n->address);
      }
    }
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    for (NodeAddress v : seen) ++in[to_index(v)];
  }
  return in;
}

SearchOutcome Simulation::run_search(NodeAddress initiator, NumId target) {
  if (!online_.contains(initiator)) throw std::invalid_argument("run_search: initiator is offline");
  SearchOutcome out;
  SearchMessage msg;
  msg.targetNumId = target;
  msg.initiator = initiator;
  NodeAddress cur = initiator;
  const NodeIdentity& start = topology_.node(initiator);
  msg.level = topology_.levels() - 1;
  msg.direction = direction_towards(start.numId, target);
  out.path.push_back(cur);

  const double tm = config_.timeoutMultiplier;
  const Pinger ping = [this](NodeAddress a) { return online_.contains(a); };

  auto forward = [&](const NeighborRef& next) {
    const NodeIdentity& from = topology_.node(cur);
    out.latencyMs += config_.latency.rtt(from, topology_.node(next.address));
    msg.add_piggyback({from.address, from.numId, from.nameId, sop_of(cur)});
    ++out.hops;
    cur = next.address;
    out.path.push_back(cur);
    NodeState& recv = nodes_[to_index(cur)];
    recv.stabilizer.update(recv.lookup, msg.piggyback);
  };

  // Every step either moves strictly towards the target or lowers the level.
  const std::size_t guard = (topology_.size() + 1) * (topology_.levels() + 1) * 4;
  for (std::size_t step = 0;; ++step) {
    if (step > guard) throw std::logic_error("run_search: routing did not terminate");
    const NodeIdentity& here = topology_.node(cur);
    NodeState& st = nodes_[to_index(cur)];
    const RouteDecision decision = route_step(here, st.lookup, msg);
    if (const auto* f = std::get_if<Forward>(&decision)) {
      if (online_.contains(f->next.address)) {
        forward(f->next);
        continue;
      }
      out.latencyMs += tm * config_.latency.rtt(here, topology_.node(f->next.address));
      ++out.resolveInvocations;
      ResolveResult r = st.stabilizer.resolve(topology_, target, msg.level, msg.direction, msg, ping);
      out.resolveMessages += r.trace.size();
      for (const Contact& c : r.trace) {
        if (!c.online) out.latencyMs += tm * config_.latency.rtt(here, topology_.node(c.address));
      }
      out.resolves.push_back(ResolveRecord{msg.level, msg.direction, cur, f->next, r.trace, r.next});
      if (r.next) {
        forward(*r.next);
      } else if (msg.level > 0) {
        --msg.level;
      } else {
        break;
      }
    } else if (const auto* d = std::get_if<Descend>(&decision)) {
      msg.level = d->level;
    } else {
      break;
    }
  }
  out.result = cur;
  out.success = topology_.node(cur).numId == target;
  return out;
}

SlotMetrics Simulation::run_slot(std::ostream* trace) {
  SlotMetrics m;
  m.slotIndex = slot_;
  const std::size_t n = topology_.size();

  // 1. arrivals
  if (config_.churn.kind == ChurnKind::Debian) {
    const std::size_t count = std::min(draw_arrival_count(config_.churn, churnRng_), offline_.size());
    for (std::size_t i = 0; i < count; ++i) {
      std::uniform_int_distribution<std::size_t> pick(0, offline_.size() - 1);
      const NodeAddress a = offline_.at(pick(churnRng_));
      arrive(a);
      nodes_[to_index(a)].remainingSlots = draw_session_length(config_.churn, churnRng_);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const NodeAddress a = address_at(i);
      const bool up = uniform_churn_online(config_.churn.uniformQ, churnRng_);
      if (up && !online_.contains(a)) {
        arrive(a);
      } else if (!up && online_.contains(a)) {
        take_offline(a);
      }
      if (up) nodes_[i].remainingSlots = 1;
    }
  }
  m.onlineCount = online_.size();

  // 2. searches
  const std::size_t no = online_.size();
  if (no > 0) {
    std::size_t upper = no * (no - 1) / 2;
    if (config_.searchCap) upper = std::min(upper, *config_.searchCap);
    std::uniform_int_distribution<std::size_t> countDist(0, upper);
    const std::size_t searches = countDist(workloadRng_);
    std::uniform_int_distribution<std::size_t> pick(0, no - 1);
    for (std::size_t i = 0; i < searches; ++i) {
      const NodeAddress initiator = online_.at(pick(workloadRng_));
      const NodeAddress targetNode = online_.at(pick(workloadRng_));
      const NumId target = topology_.node(targetNode).numId;
      const SearchOutcome o = run_search(initiator, target);
      ++m.searchesInitiated;
      m.searchesSucceeded += o.success ? 1 : 0;
      m.sumLatencyMs += o.latencyMs;
      m.sumHops += o.hops;
      m.resolveInvocations += o.resolveInvocations;
      m.resolveMessages += o.resolveMessages;
      if (trace != nullptr) *trace << search_trace_json(*this, slot_, initiator, target, o) << '\n';
    }
  }

  // 3. end-of-slot predictor updates of the online nodes
  std::vector<std::size_t> incoming;
  if (config_.predictor == PredictorKind::Ludp) incoming = incoming_connections();
  for (std::size_t i = 0; i < n; ++i) {
    if (!online_.contains(address_at(i))) continue;
    const std::size_t in = incoming.empty() ? 0 : incoming[i];
    nodes_[i].predictor.update(true, PredictorContext{slot_, in, n});
    nodes_[i].nextStatusSlot = slot_ + 1;
  }

  // 4. prediction error over every registered node
  for (std::size_t i = 0; i < n; ++i) {
    m.sumPredictionError += prediction_error(nodes_[i].predictor.value(), online_.contains(address_at(i)));
    ++m.predictionSamples;
  }

  // 5. table sizes
  const double levels = static_cast<double>(topology_.levels());
  for (NodeAddress a : online_.members()) {
    const NodeState& st = nodes_[to_index(a)];
    m.sumBackupPerLevel += static_cast<double>(st.stabilizer.size()) / levels;
    ++m.backupSamples;
    if (const StateWindow* w = st.predictor.state_window()) {
      m.sumRightStateSize += w->dbg(StateWindow::Right).state_size();
      ++m.rightStateSamples;
    }
  }

  // 6. departures at the end of the slot
  if (config_.churn.kind == ChurnKind::Debian) {
    std::vector<NodeAddress> leaving;
    for (NodeAddress a : online_.members()) {
      NodeState& st = nodes_[to_index(a)];
      if (st.remainingSlots <= 1) {
        leaving.push_back(a);
      } else {
        --st.remainingSlots;
      }
    }
    for (NodeAddress a : leaving) take_offline(a);
  }

  ++slot_;
  return m;
}

std::uint64_t topology_seed(std::uint64_t seed, std::size_t topologyIndex) {
  return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(topologyIndex) + 1));
}

void finalize(RunMetrics& m) {
  const SlotMetrics& t = m.totals;
  const double init = static_cast<double>(t.searchesInitiated);
  m.avgSuccessRatio = ratio(static_cast<double>(t.searchesSucceeded), init);
  m.avgSearchLatencyMs = ratio(t.sumLatencyMs, init);
  m.avgHops = ratio(static_cast<double>(t.sumHops), init);
  m.avgPredictionError = ratio(t.sumPredictionError, static_cast<double>(t.predictionSamples));
  m.avgBackupNeighborsPerLevel = ratio(t.sumBackupPerLevel, static_cast<double>(t.backupSamples));
  m.avgResolveMessages = ratio(static_cast<double>(t.resolveMessages), static_cast<double>(t.resolveInvocations));
  m.avgRightStateSize = ratio(t.sumRightStateSize, static_cast<double>(t.rightStateSamples));
  m.sdSuccessRatio = sample_sd(m.topologySuccessRatio);
  m.sdSearchLatencyMs = sample_sd(m.topologySearchLatencyMs);
  m.sdPredictionError = sample_sd(m.topologyPredictionError);
}

RunMetrics run_topology(const SimConfig& config, std::size_t topologyIndex, std::ostream* trace) {
  config.validate();
  const std::uint64_t seed = topology_seed(config.seed, topologyIndex);
  Simulation sim(config, generate_topology(config.capacity, seed), seed);
  sim.set_topology_index(topologyIndex);
  RunMetrics m;
  m.topologies = 1;
  m.perSlot.reserve(config.slots);
  for (std::size_t s = 0; s < config.slots; ++s) {
    m.perSlot.push_back(sim.run_slot(trace));
    m.totals += m.perSlot.back();
  }
  finalize(m);
  m.topologySuccessRatio = {m.avgSuccessRatio};
  m.topologySearchLatencyMs = {m.avgSearchLatencyMs};
  m.topologyPredictionError = {m.avgPredictionError};
  return m;
}

RunMetrics aggregate(const std::vector<RunMetrics>& runs) {
  RunMetrics out;
  for (const RunMetrics& r : runs) {
    if (out.perSlot.empty()) {
      out.perSlot = r.perSlot;
    } else {
      if (r.perSlot.size() != out.perSlot.size()) throw std::invalid_argument("aggregate: slot counts differ");
      for (std::size_t s = 0; s < r.perSlot.size(); ++s) out.perSlot[s] += r.perSlot[s];
    }
    out.totals += r.totals;
    out.topologies += r.topologies;
    out.topologySuccessRatio.insert(out.topologySuccessRatio.end(), r.topologySuccessRatio.begin(),
                                    r.topologySuccessRatio.end());
    out.topologySearchLatencyMs.insert(out.topologySearchLatencyMs.end(), r.topologySearchLatencyMs.begin(),
                                       r.topologySearchLatencyMs.end());
    out.topologyPredictionError.insert(out.topologyPredictionError.end(), r.topologyPredictionError.begin(),
                                       r.topologyPredictionError.end());
  }
  finalize(out);
  return out;
}

std::string search_trace_json(const Simulation& sim, std::size_t slot, NodeAddress initiator, NumId target,
                              const SearchOutcome& outcome) {
  const Topology& topo = sim.topology();
  nlohmann::json j;
  j["topology"] = sim.topology_index();
  j["slot"] = slot;
  j["initiator"] = topo.node(initiator).numId;
  j["target"] = target;
  auto hops = nlohmann::json::array();
  for (NodeAddress a : outcome.path) hops.push_back(topo.node(a).numId);
  j["hops"] = std::move(hops);
  auto resolves = nlohmann::json::array();
  for (const ResolveRecord& r : outcome.resolves) {
    nlohmann::json rj;
    rj["executor"] = topo.node(r.executor).numId;
    rj["level"] = r.level;
    rj["failed"] = r.failed.numId;
    rj["direction"] = r.direction == Direction::Left ? "left" : "right";
    auto contacts = nlohmann::json::array();
    for (const Contact& c : r.contacts) contacts.push_back({{"numId", c.numId}, {"online", c.online}});
    rj["contacts"] = std::move(contacts);
    rj["result"] = r.result ? nlohmann::json(r.result->numId) : nlohmann::json(nullptr);
    resolves.push_back(std::move(rj));
  }
  j["resolves"] = std::move(resolves);
  j["latencyMs"] = outcome.latencyMs;
  j["success"] = outcome.success;
  return j.dump();
}

}  // namespace sgchurn
