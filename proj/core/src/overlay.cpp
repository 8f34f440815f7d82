#include "sgchurn/overlay.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <random>
#include <stdexcept>
#include <unordered_set>

#include "sgchurn/errors.hpp"

namespace sgchurn {

bool LookupTable::contains(NumId numId) const {
  for (const auto& level : levels_) {
    for (const auto& ref : level) {
      if (ref && ref->numId == numId) return true;
    }
  }
  return false;
}

void SearchMessage::add_piggyback(const PiggybackEntry& entry) {
  std::erase_if(piggyback, [&](const PiggybackEntry& e) { return e.numId == entry.numId; });
  piggyback.push_back(entry);
}

bool SearchMessage::visited(NumId numId) const {
  return std::any_of(piggyback.begin(), piggyback.end(), [&](const PiggybackEntry& e) { return e.numId == numId; });
}

Topology::Topology(TopologySnapshot snapshot) : snapshot_(std::move(snapshot)) {
  const std::size_t n = snapshot_.nodes.size();
  if (n > 0) levels_ = snapshot_.nodes.front().nameId.length();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& node = snapshot_.nodes[i];
    if (to_index(node.address) != i) {
      throw std::invalid_argument("topology node address does not match its position");
    }
    if (node.nameId.length() != levels_) {
      throw std::invalid_argument("topology name IDs differ in length");
    }
  }
  sorted_.resize(n);
  for (std::size_t i = 0; i < n; ++i) sorted_[i] = address_at(i);
  std::sort(sorted_.begin(), sorted_.end(),
            [&](NodeAddress a, NodeAddress b) { return node(a).numId < node(b).numId; });
  rank_.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    if (r > 0 && node(sorted_[r]).numId == node(sorted_[r - 1]).numId) {
      throw std::invalid_argument("topology numIds are not unique");
    }
    rank_[to_index(sorted_[r])] = r;
  }
}

bool NodeSet::insert(NodeAddress a) {
  auto& pos = position_.at(to_index(a));
  if (pos != kAbsent) return false;
  pos = members_.size();
  members_.push_back(a);
  return true;
}

bool NodeSet::erase(NodeAddress a) {
  auto& pos = position_.at(to_index(a));
  if (pos == kAbsent) return false;
  const NodeAddress last = members_.back();
  members_[pos] = last;
  position_[to_index(last)] = pos;
  members_.pop_back();
  pos = kAbsent;
  return true;
}

bool is_power_of_two(std::size_t v) { return std::has_single_bit(v); }

namespace {

// Splits `idx` at the median along alternating axes; the lower half gets bit 0.
void bisect(std::span<const Coordinates> coords, std::span<std::size_t> idx, unsigned depth, std::vector<NameId>& names) {
  if (idx.size() <= 1) return;
  const bool byX = depth % 2 == 0;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const double ka = byX ? coords[a].x : coords[a].y;
    const double kb = byX ? coords[b].x : coords[b].y;
    if (ka != kb) return ka < kb;
    return a < b;
  });
  const std::size_t half = idx.size() / 2;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    names[idx[i]] = names[idx[i]].append(i >= half);
  }
  bisect(coords, idx.first(half), depth + 1, names);
  bisect(coords, idx.subspan(half), depth + 1, names);
}

}  // namespace

std::vector<NameId> assign_name_ids(std::span<const Coordinates> coords) {
  if (!coords.empty() && !is_power_of_two(coords.size())) {
    throw std::invalid_argument("assign_name_ids: point count must be a power of two");
  }
  for (const auto& c : coords) {
    if (c.x < 0.0 || c.x > 1.0 || c.y < 0.0 || c.y > 1.0) {
      throw std::invalid_argument("assign_name_ids: coordinates outside the unit square");
    }
  }
  std::vector<NameId> names(coords.size());
  std::vector<std::size_t> idx(coords.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  bisect(coords, idx, 0, names);
  return names;
}

TopologySnapshot generate_topology(std::size_t capacity, std::uint64_t seed) {
  if (capacity < 2 || !is_power_of_two(capacity)) {
    throw ConfigError("capacity must be a power of two (got " + std::to_string(capacity) + ")");
  }
  if (static_cast<unsigned>(std::countr_zero(capacity)) > NameId::kMaxLength) {
    throw ConfigError("capacity too large");
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<NumId> numIdDist(0, (NumId{1} << 32) - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  TopologySnapshot snap;
  snap.capacity = capacity;
  snap.rngSeed = seed;
  snap.nodes.resize(capacity);

  std::unordered_set<NumId> used;
  used.reserve(capacity * 2);
  for (std::size_t i = 0; i < capacity; ++i) {
    NumId id = numIdDist(rng);
    while (!used.insert(id).second) id = numIdDist(rng);
    snap.nodes[i].address = address_at(i);
    snap.nodes[i].numId = id;
  }
  std::vector<Coordinates> coords(capacity);
  for (auto& c : coords) {
    c.x = unit(rng);
    c.y = unit(rng);
  }
  const auto names = assign_name_ids(coords);
  for (std::size_t i = 0; i < capacity; ++i) {
    snap.nodes[i].coords = coords[i];
    snap.nodes[i].nameId = names[i];
  }
  return snap;
}

LookupTable join_node(const Topology& topology, NodeAddress joiner, const NodeSet& online) {
  LookupTable table(topology.levels());
  const std::size_t rank = topology.rank(joiner);
  auto isOnline = [&](NodeAddress a) { return a != joiner && online.contains(a); };
  for (std::size_t level = 0; level < topology.levels(); ++level) {
    for (Direction dir : {Direction::Left, Direction::Right}) {
      if (auto a = topology.next_in_level(rank, joiner, level, dir, isOnline)) {
        table.set_neighbor(level, dir, ref_of(topology.node(*a)));
      }
    }
  }
  return table;
}

RouteDecision route_step(const NodeIdentity& node, const LookupTable& lookup, const SearchMessage& msg) {
  const NumId target = msg.targetNumId;
  if (node.numId == target) return Terminate{};
  if (msg.level < lookup.levels()) {
    if (const auto& next = lookup.neighbor(msg.level, msg.direction)) {
      const bool eligible = msg.direction == Direction::Right ? (next->numId > node.numId && next->numId <= target)
                                                              : (next->numId < node.numId && next->numId >= target);
      if (eligible) return Forward{*next};
    }
  }
  if (msg.level > 0) return Descend{msg.level - 1};
  return Terminate{};
}

NumId ideal_search_oracle(std::span<const NumId> sortedOnlineNumIds, NumId target) {
  if (sortedOnlineNumIds.empty()) throw std::invalid_argument("no online nodes");
  auto it = std::upper_bound(sortedOnlineNumIds.begin(), sortedOnlineNumIds.end(), target);
  if (it == sortedOnlineNumIds.begin()) return sortedOnlineNumIds.front();
  return *std::prev(it);
}

}  // namespace sgchurn
