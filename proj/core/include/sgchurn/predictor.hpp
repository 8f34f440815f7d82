#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sgchurn/dbg.hpp"
#include "sgchurn/sw_dbg.hpp"

namespace sgchurn {

enum class PredictorKind { SwDbg, Dbg1, Dbg2, Dbg3, Dbg4, Lifetime, Ludp };

// "swdbg" | "dbg1" | "dbg2" | "dbg3" | "dbg4" | "lifetime" | "ludp"
PredictorKind parse_predictor_kind(std::string_view name);
std::string to_string(PredictorKind kind);
const std::vector<PredictorKind>& all_predictor_kinds();

struct LifetimeState {
  std::uint64_t onlineSlots = 0;
  std::uint64_t elapsedSlots = 0;
};

// Online slots over elapsed slots; 0 for an unseen node.
double lifetime_predict(const LifetimeState& state);

struct LudpState {
  std::uint64_t ageSlots = 0;
  std::uint64_t incomingConnections = 0;
  std::uint64_t currentSlot = 1;
  std::uint64_t capacity = 1;
};

// (age * incoming) / (slot * capacity), clamped to [0, 1].
double ludp_predict(const LudpState& state);

double prediction_error(double predicted, bool status);

// What the engine knows about a node when it feeds a status bit.
struct PredictorContext {
  std::size_t slot = 0;  // 0-based slot index the status belongs to
  std::size_t incomingConnections = 0;
  std::size_t capacity = 1;
};

class Predictor {
 public:
  Predictor(PredictorKind kind, SwDbgConfig swDbg = {});

  PredictorKind kind() const { return kind_; }
  double update(bool status, const PredictorContext& ctx);
  // Value produced by the last update (0 before any).
  double value() const { return value_; }

  // Non-null only for the SW-DBG kind.
  const StateWindow* state_window() const { return std::get_if<StateWindow>(&impl_); }

 private:
  PredictorKind kind_;
  std::variant<StateWindow, Dbg, LifetimeState, LudpState> impl_;
  double value_ = 0.0;
};

}  // namespace sgchurn
