#include "sgchurn/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sgchurn/errors.hpp"

namespace sgchurn {

namespace {

struct KindName {
  PredictorKind kind;
  std::string_view name;
};

constexpr KindName kKindNames[] = {
    {PredictorKind::SwDbg, "swdbg"},       {PredictorKind::Dbg1, "dbg1"}, {PredictorKind::Dbg2, "dbg2"},
    {PredictorKind::Dbg3, "dbg3"},         {PredictorKind::Dbg4, "dbg4"}, {PredictorKind::Lifetime, "lifetime"},
    {PredictorKind::Ludp, "ludp"},
};

}  // namespace

PredictorKind parse_predictor_kind(std::string_view name) {
  for (const auto& kn : kKindNames) {
    if (kn.name == name) return kn.kind;
  }
  throw ConfigError("predictor: unknown kind '" + std::string(name) +
                    "' (expected swdbg|dbg1|dbg2|dbg3|dbg4|lifetime|ludp)");
}

std::string to_string(PredictorKind kind) {
  for (const auto& kn : kKindNames) {
    if (kn.kind == kind) return std::string(kn.name);
  }
  return "unknown";
}

const std::vector<PredictorKind>& all_predictor_kinds() {
  static const std::vector<PredictorKind> kinds = {PredictorKind::SwDbg, PredictorKind::Dbg1,     PredictorKind::Dbg2,
                                                   PredictorKind::Dbg3,  PredictorKind::Dbg4,     PredictorKind::Lifetime,
                                                   PredictorKind::Ludp};
  return kinds;
}

double lifetime_predict(const LifetimeState& state) {
  if (state.elapsedSlots == 0) return 0.0;
  return static_cast<double>(state.onlineSlots) / static_cast<double>(state.elapsedSlots);
}

double ludp_predict(const LudpState& state) {
  if (state.currentSlot == 0 || state.capacity == 0) return 0.0;
  const double op = (static_cast<double>(state.ageSlots) * static_cast<double>(state.incomingConnections)) /
                    (static_cast<double>(state.currentSlot) * static_cast<double>(state.capacity));
  return std::clamp(op, 0.0, 1.0);
}

double prediction_error(double predicted, bool status) {
  if (!(predicted >= 0.0 && predicted <= 1.0)) {
    throw std::invalid_argument("prediction_error: predicted value outside [0, 1]");
  }
  return std::abs(predicted - (status ? 1.0 : 0.0));
}

Predictor::Predictor(PredictorKind kind, SwDbgConfig swDbg) : kind_(kind), impl_(LifetimeState{}) {
  switch (kind) {
    case PredictorKind::SwDbg:
      impl_.emplace<StateWindow>(swDbg);
      break;
    case PredictorKind::Dbg1:
    case PredictorKind::Dbg2:
    case PredictorKind::Dbg3:
    case PredictorKind::Dbg4:
      impl_.emplace<Dbg>(static_cast<unsigned>(kind) - static_cast<unsigned>(PredictorKind::Dbg1) + 1U);
      break;
    case PredictorKind::Lifetime:
      break;
    case PredictorKind::Ludp:
      impl_.emplace<LudpState>();
      break;
  }
}

double Predictor::update(bool status, const PredictorContext& ctx) {
  value_ = std::visit(
      [&](auto& impl) -> double {
        using T = std::decay_t<decltype(impl)>;
        if constexpr (std::is_same_v<T, StateWindow> || std::is_same_v<T, Dbg>) {
          return impl.update(status);
        } else if constexpr (std::is_same_v<T, LifetimeState>) {
          impl.onlineSlots += status ? 1 : 0;
          impl.elapsedSlots = std::max<std::uint64_t>(ctx.slot + 1, impl.onlineSlots);
          return lifetime_predict(impl);
        } else {
          impl.ageSlots += status ? 1 : 0;
          impl.currentSlot = std::max<std::uint64_t>(ctx.slot + 1, impl.ageSlots);
          impl.incomingConnections = ctx.incomingConnections;
          impl.capacity = std::max<std::size_t>(ctx.capacity, 1);
          return ludp_predict(impl);
        }
      },
      impl_);
  return value_;
}

}  // namespace sgchurn
