#pragma once

#include <array>
#include <cstdint>

#include "sgchurn/dbg.hpp"

namespace sgchurn {

// How each window DBG's error is measured before deciding to slide.
enum class PredErrorMode {
  // |sop - online fraction over the DBG's last stateSize slots|
  Window,
  // |sop - status|
  Instant,
};

struct SwDbgConfig {
  unsigned maxStateSize = 8;
  PredErrorMode errorMode = PredErrorMode::Window;
};

// Sliding window of three DBGs with consecutive state sizes (Left, Center,
// Right). Each update feeds all three, then slides toward the side whose
// errors strictly decrease and reports the sop of the lowest-error DBG.
class StateWindow {
 public:
  enum Slot { Left = 0, Center = 1, Right = 2 };

  explicit StateWindow(SwDbgConfig config = {});

  double update(bool status);

  const Dbg& dbg(Slot s) const { return window_[s]; }
  const std::array<double, 3>& errors() const { return errors_; }
  double last_sop() const { return lastSop_; }
  std::uint64_t refused_enlargements() const { return refusedEnlargements_; }
  const SwDbgConfig& config() const { return config_; }

  // Online fraction of the last `bits` status bits (fewer while warming up).
  double windowed_fraction(unsigned bits) const;

 private:
  double error_of(const Dbg& dbg, double sop, bool status) const;

  SwDbgConfig config_;
  std::array<Dbg, 3> window_;
  std::array<double, 3> sops_{};
  std::array<double, 3> errors_{};
  std::uint64_t history_ = 0;
  std::uint64_t seen_ = 0;
  double lastSop_ = 0.0;
  std::uint64_t refusedEnlargements_ = 0;
};

}  // namespace sgchurn
