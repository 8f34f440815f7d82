#include "sgchurn/sw_dbg.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace sgchurn {

StateWindow::StateWindow(SwDbgConfig config) : config_(config), window_{Dbg(1), Dbg(2), Dbg(3)} {
  if (config_.maxStateSize < 3 || config_.maxStateSize > Dbg::kMaxStateSize) {
    throw std::invalid_argument("SW-DBG max state size must be in [3, " + std::to_string(Dbg::kMaxStateSize) + "]");
  }
}

double StateWindow::windowed_fraction(unsigned bits) const {
  const auto n = static_cast<unsigned>(std::min<std::uint64_t>(bits, std::min<std::uint64_t>(seen_, 64)));
  if (n == 0) return 0.0;
  const std::uint64_t mask = n == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
  return static_cast<double>(std::popcount(history_ & mask)) / static_cast<double>(n);
}

double StateWindow::error_of(const Dbg& dbg, double sop, bool status) const {
  if (config_.errorMode == PredErrorMode::Instant) return std::abs((status ? 1.0 : 0.0) - sop);
  return std::abs(sop - windowed_fraction(dbg.state_size()));
}

double StateWindow::update(bool status) {
  history_ = (history_ << 1) | static_cast<std::uint64_t>(status);
  ++seen_;
  for (int i = 0; i < 3; ++i) {
    sops_[i] = window_[i].update(status);
    errors_[i] = error_of(window_[i], sops_[i], status);
  }

  while (errors_[Left] > errors_[Center] && errors_[Center] > errors_[Right]) {
    if (window_[Right].state_size() + 1 > config_.maxStateSize) {
      ++refusedEnlargements_;
      break;
    }
    Dbg grown = window_[Right].enlarge();
    window_[Left] = std::move(window_[Center]);
    window_[Center] = std::move(window_[Right]);
    window_[Right] = std::move(grown);
    sops_ = {sops_[Center], sops_[Right], window_[Right].sop()};
    errors_ = {errors_[Center], errors_[Right], error_of(window_[Right], sops_[Right], status)};
  }

  while (errors_[Left] < errors_[Center] && errors_[Center] < errors_[Right]) {
    if (window_[Left].state_size() == 1) break;
    Dbg shrunk = window_[Left].shrink();
    window_[Right] = std::move(window_[Center]);
    window_[Center] = std::move(window_[Left]);
    window_[Left] = std::move(shrunk);
    sops_ = {window_[Left].sop(), sops_[Left], sops_[Center]};
    errors_ = {error_of(window_[Left], sops_[Left], status), errors_[Left], errors_[Center]};
  }

  const auto best = std::min_element(errors_.begin(), errors_.end()) - errors_.begin();
  lastSop_ = std::clamp(sops_[best], 0.0, 1.0);
  return lastSop_;
}

}  // namespace sgchurn
