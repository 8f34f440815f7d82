#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include "sgchurn/backup_table.hpp"
#include "sgchurn/dks.hpp"
#include "sgchurn/kademlia.hpp"

namespace sgchurn {

enum class StabilizerKind { Interlaced, Kademlia, Dks, None };

// "interlaced" | "kademlia" | "dks" | "none"
StabilizerKind parse_stabilizer_kind(std::string_view name);
std::string to_string(StabilizerKind kind);

// Per-node timeout-failure recovery state of one of the four kinds.
class Stabilizer {
 public:
  Stabilizer(StabilizerKind kind, const NodeIdentity& owner, std::size_t levels, std::size_t b);

  StabilizerKind kind() const { return kind_; }

  // Called after the owner (re)joins and its lookup table changed.
  void on_join(const Topology& topology, const LookupTable& lookup, const NodeSet& online);
  // Called when the owner's lookup table changed outside a join.
  void on_lookup_changed(const LookupTable& lookup);

  void update(const LookupTable& lookup, std::span<const PiggybackEntry> piggyback);
  ResolveResult resolve(const Topology& topology, NumId target, std::size_t level, Direction dir,
                        const SearchMessage& msg, const Pinger& ping);

  // Stored alternative neighbors, summed over levels and directions.
  std::size_t size() const;

  const BackupTable* backup_table() const { return std::get_if<BackupTable>(&impl_); }
  const KademliaBuckets* kademlia() const { return std::get_if<KademliaBuckets>(&impl_); }
  const DksPointers* dks() const { return std::get_if<DksPointers>(&impl_); }

 private:
  StabilizerKind kind_;
  std::variant<std::monostate, BackupTable, KademliaBuckets, DksPointers> impl_;
};

}  // namespace sgchurn
