#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "sgchurn/overlay.hpp"

namespace sgchurn {

// Liveness probe used by resolve handlers. A contact to an offline node costs
// a timeout; to an online one, a round trip.
using Pinger = std::function<bool(NodeAddress)>;

struct Contact {
  NodeAddress address{};
  NumId numId = 0;
  bool online = false;
  // Candidate score when the strategy ranks candidates, 0 otherwise.
  double score = 0.0;
};

struct ResolveResult {
  std::optional<NeighborRef> next;
  std::vector<Contact> trace;
};

// A backup element is a routing candidate when it does not overshoot the
// target in the search direction and the message has not visited it.
bool cand_check(NumId entryNumId, NumId target, Direction dir, const SearchMessage& msg);

// Backup level for an element: its prefix length with the owner, capped at
// the table height.
std::size_t backup_level(const NameId& owner, const NameId& element, std::size_t levels);

}  // namespace sgchurn
