#pragma once

#include <array>
#include <cstddef>
#include <deque>
#include <vector>

#include "sgchurn/overlay.hpp"
#include "sgchurn/resolve.hpp"

namespace sgchurn {

// Successor-list baseline: at every level and direction, the nodes right
// after the lookup neighbor in the level list. No piggyback learning.
class DksPointers {
 public:
  DksPointers(const NodeIdentity& owner, std::size_t levels, std::size_t totalSize);

  std::size_t levels() const { return lists_.size() / 2; }
  std::size_t size() const;
  std::size_t capacity(std::size_t level, Direction dir) const { return capacity_.at(level)[index_of(dir)]; }
  const std::deque<NeighborRef>& list(std::size_t level, Direction dir) const {
    return lists_.at(level * 2 + index_of(dir));
  }

  // Refills every list from the online nodes that follow the lookup neighbor.
  void init(const Topology& topology, const LookupTable& lookup, const NodeSet& online);

  // Pings the list from the head. Offline heads are dropped and the list is
  // extended past its tail with the next node of the level list, online or not.
  ResolveResult resolve(const Topology& topology, NumId target, std::size_t level, Direction dir,
                        const SearchMessage& msg, const Pinger& ping);

 private:
  NodeIdentity owner_;
  std::vector<std::array<std::size_t, 2>> capacity_;
  std::vector<std::deque<NeighborRef>> lists_;
};

}  // namespace sgchurn
