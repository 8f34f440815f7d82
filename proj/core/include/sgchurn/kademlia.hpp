#pragma once

#include <array>
#include <cstddef>
#include <deque>
#include <span>
#include <vector>

#include "sgchurn/overlay.hpp"
#include "sgchurn/resolve.hpp"

namespace sgchurn {

// Per-level {left, right} capacities for a total budget b spread over L
// levels. Odd per-level shares give the spare slot to the left bucket.
std::vector<std::array<std::size_t, 2>> kademlia_capacity(std::size_t b, std::size_t levels);

// Recency-ordered buckets replacing the backup table's sets. Head is newest.
class KademliaBuckets {
 public:
  KademliaBuckets(const NodeIdentity& owner, std::size_t levels, std::size_t totalSize);

  std::size_t levels() const { return buckets_.size() / 2; }
  std::size_t size() const;
  std::size_t capacity(std::size_t level, Direction dir) const { return capacity_.at(level)[index_of(dir)]; }
  const std::deque<NeighborRef>& bucket(std::size_t level, Direction dir) const {
    return buckets_.at(level * 2 + index_of(dir));
  }

  void update(const LookupTable& lookup, std::span<const PiggybackEntry> piggyback);
  ResolveResult resolve(NumId target, std::size_t level, Direction dir, const SearchMessage& msg, const Pinger& ping);
  void purge_lookup_neighbors(const LookupTable& lookup);

 private:
  NodeIdentity owner_;
  std::vector<std::array<std::size_t, 2>> capacity_;
  std::vector<std::deque<NeighborRef>> buckets_;
};

}  // namespace sgchurn
