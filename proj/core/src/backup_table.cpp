#include "sgchurn/backup_table.hpp"

#include <algorithm>
#include <stdexcept>

namespace sgchurn {

namespace {

NumId distance(NumId a, NumId b) { return a > b ? a - b : b - a; }

}  // namespace

double interlaced_score(double sop, unsigned prefixLength, NumId entryNumId, NumId reference) {
  if (entryNumId == reference) {
    throw std::logic_error("interlaced_score: entry coincides with its reference numId");
  }
  return sop * static_cast<double>(prefixLength) / static_cast<double>(distance(entryNumId, reference));
}

BackupTable::BackupTable(const NodeIdentity& owner, std::size_t levels, std::size_t maxSize)
    : owner_(owner), maxSize_(maxSize), sets_(levels * 2) {
  if (levels == 0) throw std::invalid_argument("backup table needs at least one level");
}

const BackupEntry* BackupTable::find(NumId numId) const {
  for (const auto& set : sets_) {
    for (const auto& e : set) {
      if (e.numId == numId) return &e;
    }
  }
  return nullptr;
}

bool BackupTable::remove(NumId numId) {
  for (auto& set : sets_) {
    auto it = std::find_if(set.begin(), set.end(), [&](const BackupEntry& e) { return e.numId == numId; });
    if (it != set.end()) {
      set.erase(it);
      --size_;
      return true;
    }
  }
  return false;
}

void BackupTable::evict_lowest_score() {
  BackupEntry* worst = nullptr;
  for (auto& set : sets_) {
    for (auto& e : set) {
      e.score = interlaced_score(e.sop, common_prefix_length(owner_.nameId, e.nameId), e.numId, owner_.numId);
      if (worst == nullptr) {
        worst = &e;
        continue;
      }
      const NumId dw = distance(worst->numId, owner_.numId);
      const NumId de = distance(e.numId, owner_.numId);
      if (e.score < worst->score || (e.score == worst->score && (de > dw || (de == dw && e.nameId > worst->nameId)))) {
        worst = &e;
      }
    }
  }
  if (worst != nullptr) remove(worst->numId);
}

void BackupTable::update(const LookupTable& lookup, std::span<const PiggybackEntry> piggyback) {
  for (const auto& p : piggyback) {
    if (p.numId == owner_.numId || lookup.contains(p.numId)) continue;
    const std::size_t level = backup_level(owner_.nameId, p.nameId, levels());
    const Direction dir = direction_towards(owner_.numId, p.numId);
    auto& target = mutable_set(level, dir);
    auto existing = std::find_if(target.begin(), target.end(), [&](const BackupEntry& e) { return e.numId == p.numId; });
    if (existing != target.end()) {
      existing->address = p.address;
      existing->nameId = p.nameId;
      existing->sop = p.sop;
      continue;
    }
    if (maxSize_ == 0) continue;
    if (size_ >= maxSize_) evict_lowest_score();
    mutable_set(level, dir).push_back({p.address, p.numId, p.nameId, p.sop, 0.0});
    ++size_;
  }
}

ResolveResult BackupTable::resolve(NumId target, std::size_t level, Direction dir, const SearchMessage& msg,
                                   const Pinger& ping) {
  ResolveResult result;
  if (level >= levels()) return result;

  std::vector<BackupEntry> candidates;
  for (const auto& e : set(level, dir)) {
    if (e.numId == target) {
      const bool online = ping(e.address);
      result.trace.push_back({e.address, e.numId, online, 0.0});
      if (online) {
        result.next = NeighborRef{e.address, e.numId, e.nameId};
        return result;
      }
      continue;
    }
    if (cand_check(e.numId, target, dir, msg)) {
      BackupEntry c = e;
      c.score = interlaced_score(e.sop, common_prefix_length(owner_.nameId, e.nameId), e.numId, target);
      candidates.push_back(c);
    }
  }
  // The target entry answered offline above; it cannot be a candidate.
  if (!result.trace.empty()) remove(target);

  std::sort(candidates.begin(), candidates.end(), [&](const BackupEntry& a, const BackupEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    const NumId da = distance(a.numId, target);
    const NumId db = distance(b.numId, target);
    if (da != db) return da < db;
    return a.nameId < b.nameId;
  });

  for (const auto& c : candidates) {
    const bool online = ping(c.address);
    result.trace.push_back({c.address, c.numId, online, c.score});
    if (online) {
      result.next = NeighborRef{c.address, c.numId, c.nameId};
      return result;
    }
    remove(c.numId);
  }
  return result;
}

void BackupTable::purge_lookup_neighbors(const LookupTable& lookup) {
  for (auto& set : sets_) {
    const auto before = set.size();
    std::erase_if(set, [&](const BackupEntry& e) { return lookup.contains(e.numId); });
    size_ -= before - set.size();
  }
}

}  // namespace sgchurn
