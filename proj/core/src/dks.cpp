#include "sgchurn/dks.hpp"

#include "sgchurn/kademlia.hpp"

namespace sgchurn {

DksPointers::DksPointers(const NodeIdentity& owner, std::size_t levels, std::size_t totalSize)
    : owner_(owner), capacity_(kademlia_capacity(totalSize, levels)), lists_(levels * 2) {}

std::size_t DksPointers::size() const {
  std::size_t n = 0;
  for (const auto& l : lists_) n += l.size();
  return n;
}

void DksPointers::init(const Topology& topology, const LookupTable& lookup, const NodeSet& online) {
  const auto isOnline = [&](NodeAddress a) { return online.contains(a); };
  for (std::size_t level = 0; level < levels(); ++level) {
    for (Direction dir : {Direction::Left, Direction::Right}) {
      auto& list = lists_[level * 2 + index_of(dir)];
      list.clear();
      const auto& head = lookup.neighbor(level, dir);
      if (!head) continue;
      std::size_t rank = topology.rank(head->address);
      while (list.size() < capacity(level, dir)) {
        const auto next = topology.next_in_level(rank, owner_.address, level, dir, isOnline);
        if (!next) break;
        list.push_back(ref_of(topology.node(*next)));
        rank = topology.rank(*next);
      }
    }
  }
}

ResolveResult DksPointers::resolve(const Topology& topology, NumId target, std::size_t level, Direction dir,
                                   const SearchMessage& msg, const Pinger& ping) {
  ResolveResult result;
  if (level >= levels()) return result;
  auto& list = lists_[level * 2 + index_of(dir)];
  const auto any = [](NodeAddress) { return true; };

  std::size_t i = 0;
  while (i < list.size()) {
    const NeighborRef e = list[i];
    const bool overshoot = dir == Direction::Right ? e.numId > target : e.numId < target;
    if (overshoot) break;
    if (msg.visited(e.numId)) {
      ++i;
      continue;
    }
    const bool online = ping(e.address);
    result.trace.push_back({e.address, e.numId, online, 0.0});
    if (online) {
      result.next = e;
      return result;
    }
    const NodeAddress tail = list.back().address;
    list.erase(list.begin() + static_cast<std::ptrdiff_t>(i));
    if (const auto next = topology.next_in_level(topology.rank(tail), owner_.address, level, dir, any)) {
      list.push_back(ref_of(topology.node(*next)));
    }
  }
  return result;
}

}  // namespace sgchurn
