#include "sgchurn/kademlia.hpp"

#include <algorithm>
#include <stdexcept>

namespace sgchurn {

std::vector<std::array<std::size_t, 2>> kademlia_capacity(std::size_t b, std::size_t levels) {
  if (levels == 0) throw std::invalid_argument("kademlia_capacity: levels must be >= 1");
  std::vector<std::array<std::size_t, 2>> caps(levels);
  const std::size_t base = b / levels;
  for (auto& c : caps) {
    c[index_of(Direction::Right)] = base / 2;
    c[index_of(Direction::Left)] = base - base / 2;
  }
  std::size_t rest = b % levels;
  for (std::size_t level = 0; rest > 0; ++level) {
    if (rest >= 2) {
      ++caps[level][index_of(Direction::Left)];
      ++caps[level][index_of(Direction::Right)];
      rest -= 2;
    } else {
      ++caps[level][index_of(Direction::Left)];
      rest = 0;
    }
  }
  return caps;
}

KademliaBuckets::KademliaBuckets(const NodeIdentity& owner, std::size_t levels, std::size_t totalSize)
    : owner_(owner), capacity_(kademlia_capacity(totalSize, levels)), buckets_(levels * 2) {}

std::size_t KademliaBuckets::size() const {
  std::size_t n = 0;
  for (const auto& b : buckets_) n += b.size();
  return n;
}

void KademliaBuckets::update(const LookupTable& lookup, std::span<const PiggybackEntry> piggyback) {
  for (const auto& p : piggyback) {
    if (p.numId == owner_.numId || lookup.contains(p.numId)) continue;
    const std::size_t level = backup_level(owner_.nameId, p.nameId, levels());
    const Direction dir = direction_towards(owner_.numId, p.numId);
    const std::size_t cap = capacity(level, dir);
    if (cap == 0) continue;
    auto& bucket = buckets_[level * 2 + index_of(dir)];
    std::erase_if(bucket, [&](const NeighborRef& r) { return r.numId == p.numId; });
    bucket.push_front({p.address, p.numId, p.nameId});
    while (bucket.size() > cap) bucket.pop_back();
  }
}

ResolveResult KademliaBuckets::resolve(NumId target, std::size_t level, Direction dir, const SearchMessage& msg,
                                       const Pinger& ping) {
  ResolveResult result;
  if (level >= levels()) return result;
  auto& bucket = buckets_[level * 2 + index_of(dir)];

  // same early exit as the interlaced table when the target itself is stored
  auto exact = std::find_if(bucket.begin(), bucket.end(), [&](const NeighborRef& r) { return r.numId == target; });
  if (exact != bucket.end()) {
    const NeighborRef ref = *exact;
    const bool online = ping(ref.address);
    result.trace.push_back({ref.address, ref.numId, online, 0.0});
    if (online) {
      result.next = ref;
      return result;
    }
    bucket.erase(exact);
  }

  for (auto it = bucket.begin(); it != bucket.end();) {
    if (!cand_check(it->numId, target, dir, msg)) {
      ++it;
      continue;
    }
    const bool online = ping(it->address);
    result.trace.push_back({it->address, it->numId, online, 0.0});
    if (online) {
      result.next = *it;
      return result;
    }
    it = bucket.erase(it);
  }
  return result;
}

void KademliaBuckets::purge_lookup_neighbors(const LookupTable& lookup) {
  for (auto& b : buckets_) {
    std::erase_if(b, [&](const NeighborRef& r) { return lookup.contains(r.numId); });
  }
}

}  // namespace sgchurn
