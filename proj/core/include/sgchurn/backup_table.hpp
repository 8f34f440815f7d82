#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sgchurn/overlay.hpp"
#include "sgchurn/resolve.hpp"

namespace sgchurn {

struct BackupEntry {
  NodeAddress address{};
  NumId numId = 0;
  NameId nameId;
  double sop = 0.0;
  double score = 0.0;
};

// Interlaced backup table: per level and direction, a set of scored entries,
// with at most `maxSize` entries in total.
class BackupTable {
 public:
  BackupTable(const NodeIdentity& owner, std::size_t levels, std::size_t maxSize);

  const NodeIdentity& owner() const { return owner_; }
  std::size_t levels() const { return sets_.size() / 2; }
  std::size_t max_size() const { return maxSize_; }
  std::size_t size() const { return size_; }

  const std::vector<BackupEntry>& set(std::size_t level, Direction dir) const {
    return sets_.at(level * 2 + index_of(dir));
  }
  const BackupEntry* find(NumId numId) const;
  bool remove(NumId numId);

  // backupUpdate: insert piggybacked elements that are not lookup neighbors.
  // A known element is overwritten in place; on a full table every entry is
  // rescored against the owner and the minimum is evicted first.
  void update(const LookupTable& lookup, std::span<const PiggybackEntry> piggyback);

  // backupResolve: contact the eligible entries of (level, dir) in descending
  // target-relative score until one answers. Offline ones are dropped from
  // the table.
  ResolveResult resolve(NumId target, std::size_t level, Direction dir, const SearchMessage& msg,
                        const Pinger& ping);

  // Drops entries that became lookup neighbors.
  void purge_lookup_neighbors(const LookupTable& lookup);

 private:
  std::vector<BackupEntry>& mutable_set(std::size_t level, Direction dir) { return sets_[level * 2 + index_of(dir)]; }
  void evict_lowest_score();

  NodeIdentity owner_;
  std::size_t maxSize_;
  std::size_t size_ = 0;
  std::vector<std::vector<BackupEntry>> sets_;
};

// sop * prefixLength / |entry - reference|. The reference is the owner when
// updating and the search target when resolving; it never equals the entry.
double interlaced_score(double sop, unsigned prefixLength, NumId entryNumId, NumId reference);

}  // namespace sgchurn
