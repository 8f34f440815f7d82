#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "sgchurn/name_id.hpp"

namespace sgchurn {

// Opaque node handle. In the simulator it indexes TopologySnapshot::nodes.
enum class NodeAddress : std::uint32_t {};

constexpr std::uint32_t to_index(NodeAddress a) { return static_cast<std::uint32_t>(a); }
constexpr NodeAddress address_at(std::size_t index) { return static_cast<NodeAddress>(index); }

using NumId = std::uint64_t;

enum class Direction : std::uint8_t { Left = 0, Right = 1 };

constexpr std::size_t index_of(Direction d) { return static_cast<std::size_t>(d); }
constexpr Direction opposite(Direction d) { return d == Direction::Left ? Direction::Right : Direction::Left; }

// Side of `from` on which `to` lies in numerical ID order.
constexpr Direction direction_towards(NumId from, NumId to) { return to > from ? Direction::Right : Direction::Left; }

struct Coordinates {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Coordinates&, const Coordinates&) = default;
};

struct NodeIdentity {
  NodeAddress address{};
  NumId numId = 0;
  NameId nameId;
  Coordinates coords;
  friend bool operator==(const NodeIdentity&, const NodeIdentity&) = default;
};

struct TopologySnapshot {
  std::size_t capacity = 0;
  std::vector<NodeIdentity> nodes;
  std::uint64_t rngSeed = 0;
  friend bool operator==(const TopologySnapshot&, const TopologySnapshot&) = default;
};

// (address, numId, nameId) triple stored in lookup tables.
struct NeighborRef {
  NodeAddress address{};
  NumId numId = 0;
  NameId nameId;
  friend bool operator==(const NeighborRef&, const NeighborRef&) = default;
};

inline NeighborRef ref_of(const NodeIdentity& n) { return {n.address, n.numId, n.nameId}; }

class LookupTable {
 public:
  LookupTable() = default;
  explicit LookupTable(std::size_t levels) : levels_(levels) {}

  std::size_t levels() const { return levels_.size(); }

  const std::optional<NeighborRef>& neighbor(std::size_t level, Direction dir) const {
    return levels_.at(level)[index_of(dir)];
  }
  void set_neighbor(std::size_t level, Direction dir, std::optional<NeighborRef> ref) {
    levels_.at(level)[index_of(dir)] = ref;
  }

  // True when numId appears as a neighbor at any level or direction.
  bool contains(NumId numId) const;

  friend bool operator==(const LookupTable&, const LookupTable&) = default;

 private:
  std::vector<std::array<std::optional<NeighborRef>, 2>> levels_;
};

struct PiggybackEntry {
  NodeAddress address{};
  NumId numId = 0;
  NameId nameId;
  double sop = 0.0;
};

struct SearchMessage {
  NumId targetNumId = 0;
  std::size_t level = 0;
  Direction direction = Direction::Right;
  std::vector<PiggybackEntry> piggyback;
  NodeAddress initiator{};
  double accumulatedLatencyMs = 0.0;
  std::size_t hops = 0;

  // Appends an entry, replacing an older one with the same numId.
  void add_piggyback(const PiggybackEntry& entry);
  bool visited(NumId numId) const;
};

// Numerical-ID-sorted view of a snapshot with the lookups the simulator needs.
class Topology {
 public:
  explicit Topology(TopologySnapshot snapshot);

  const TopologySnapshot& snapshot() const { return snapshot_; }
  std::size_t size() const { return snapshot_.nodes.size(); }
  // Height of every lookup table: the name ID length.
  std::size_t levels() const { return levels_; }
  const NodeIdentity& node(NodeAddress a) const { return snapshot_.nodes.at(to_index(a)); }

  std::span<const NodeAddress> sorted() const { return sorted_; }
  std::size_t rank(NodeAddress a) const { return rank_.at(to_index(a)); }

  // Nearest node from `owner` in `dir` (by numId) that shares at least `level`
  // prefix bits with `owner` and satisfies `accept`, starting the scan after
  // position `from_rank`.
  template <class Accept>
  std::optional<NodeAddress> next_in_level(std::size_t from_rank, NodeAddress owner, std::size_t level, Direction dir,
                                           Accept&& accept) const;

 private:
  TopologySnapshot snapshot_;
  std::size_t levels_ = 0;
  std::vector<NodeAddress> sorted_;
  std::vector<std::size_t> rank_;
};

template <class Accept>
std::optional<NodeAddress> Topology::next_in_level(std::size_t from_rank, NodeAddress owner, std::size_t level,
                                                   Direction dir, Accept&& accept) const {
  const NameId& ownerName = node(owner).nameId;
  if (dir == Direction::Right) {
    for (std::size_t r = from_rank + 1; r < sorted_.size(); ++r) {
      const NodeAddress a = sorted_[r];
      if (common_prefix_length(ownerName, node(a).nameId) >= level && accept(a)) return a;
    }
  } else {
    for (std::size_t r = from_rank; r-- > 0;) {
      const NodeAddress a = sorted_[r];
      if (common_prefix_length(ownerName, node(a).nameId) >= level && accept(a)) return a;
    }
  }
  return std::nullopt;
}

// Set of node addresses with O(1) insert/erase/contains and indexed access,
// used for the online and offline pools.
class NodeSet {
 public:
  explicit NodeSet(std::size_t universe = 0) : position_(universe, kAbsent) {}

  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  bool contains(NodeAddress a) const { return position_.at(to_index(a)) != kAbsent; }
  NodeAddress at(std::size_t i) const { return members_.at(i); }
  std::span<const NodeAddress> members() const { return members_; }

  bool insert(NodeAddress a);
  bool erase(NodeAddress a);

 private:
  static constexpr std::size_t kAbsent = static_cast<std::size_t>(-1);
  std::vector<NodeAddress> members_;
  std::vector<std::size_t> position_;
};

std::vector<NameId> assign_name_ids(std::span<const Coordinates> coords);

TopologySnapshot generate_topology(std::size_t capacity, std::uint64_t seed);

bool is_power_of_two(std::size_t v);

// Oracle join: nearest online nodes by numId at each level among nodes
// sharing at least that many prefix bits with the joiner.
LookupTable join_node(const Topology& topology, NodeAddress joiner, const NodeSet& online);

struct Forward {
  NeighborRef next;
};
struct Descend {
  std::size_t level = 0;
};
struct Terminate {};

using RouteDecision = std::variant<Forward, Descend, Terminate>;

RouteDecision route_step(const NodeIdentity& node, const LookupTable& lookup, const SearchMessage& msg);

// Greatest element <= target, or the smallest element when none is.
NumId ideal_search_oracle(std::span<const NumId> sortedOnlineNumIds, NumId target);

}  // namespace sgchurn
