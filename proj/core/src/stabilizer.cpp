#include "sgchurn/stabilizer.hpp"

#include <algorithm>

#include "sgchurn/errors.hpp"

namespace sgchurn {

bool cand_check(NumId entryNumId, NumId target, Direction dir, const SearchMessage& msg) {
  if (dir == Direction::Right && entryNumId > target) return false;
  if (dir == Direction::Left && entryNumId < target) return false;
  return !msg.visited(entryNumId);
}

std::size_t backup_level(const NameId& owner, const NameId& element, std::size_t levels) {
  return std::min<std::size_t>(common_prefix_length(owner, element), levels - 1);
}

StabilizerKind parse_stabilizer_kind(std::string_view name) {
  if (name == "interlaced") return StabilizerKind::Interlaced;
  if (name == "kademlia") return StabilizerKind::Kademlia;
  if (name == "dks") return StabilizerKind::Dks;
  if (name == "none") return StabilizerKind::None;
  throw ConfigError("stabilizer: unknown kind '" + std::string(name) + "' (expected interlaced|kademlia|dks|none)");
}

std::string to_string(StabilizerKind kind) {
  switch (kind) {
    case StabilizerKind::Interlaced:
      return "interlaced";
    case StabilizerKind::Kademlia:
      return "kademlia";
    case StabilizerKind::Dks:
      return "dks";
    case StabilizerKind::None:
      return "none";
  }
  return "unknown";
}

Stabilizer::Stabilizer(StabilizerKind kind, const NodeIdentity& owner, std::size_t levels, std::size_t b)
    : kind_(kind) {
  switch (kind) {
    case StabilizerKind::Interlaced:
      impl_.emplace<BackupTable>(owner, levels, b);
      break;
    case StabilizerKind::Kademlia:
      impl_.emplace<KademliaBuckets>(owner, levels, b);
      break;
    case StabilizerKind::Dks:
      impl_.emplace<DksPointers>(owner, levels, b);
      break;
    case StabilizerKind::None:
      break;
  }
}

void Stabilizer::on_join(const Topology& topology, const LookupTable& lookup, const NodeSet& online) {
  if (auto* d = std::get_if<DksPointers>(&impl_)) {
    d->init(topology, lookup, online);
    return;
  }
  on_lookup_changed(lookup);
}

void Stabilizer::on_lookup_changed(const LookupTable& lookup) {
  if (auto* t = std::get_if<BackupTable>(&impl_)) t->purge_lookup_neighbors(lookup);
  if (auto* k = std::get_if<KademliaBuckets>(&impl_)) k->purge_lookup_neighbors(lookup);
}

void Stabilizer::update(const LookupTable& lookup, std::span<const PiggybackEntry> piggyback) {
  if (auto* t = std::get_if<BackupTable>(&impl_)) t->update(lookup, piggyback);
  if (auto* k = std::get_if<KademliaBuckets>(&impl_)) k->update(lookup, piggyback);
}

ResolveResult Stabilizer::resolve(const Topology& topology, NumId target, std::size_t level, Direction dir,
                                  const SearchMessage& msg, const Pinger& ping) {
  if (auto* t = std::get_if<BackupTable>(&impl_)) return t->resolve(target, level, dir, msg, ping);
  if (auto* k = std::get_if<KademliaBuckets>(&impl_)) return k->resolve(target, level, dir, msg, ping);
  if (auto* d = std::get_if<DksPointers>(&impl_)) return d->resolve(topology, target, level, dir, msg, ping);
  return {};
}

std::size_t Stabilizer::size() const {
  return std::visit(
      [](const auto& impl) -> std::size_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(impl)>, std::monostate>) {
          return 0;
        } else {
          return impl.size();
        }
      },
      impl_);
}

}  // namespace sgchurn
