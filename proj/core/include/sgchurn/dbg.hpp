#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace sgchurn {

using TransitionMatrix = Eigen::MatrixXd;

// Stationary distribution of an irreducible row-stochastic matrix, by a
// direct linear solve of pi = pi P with sum(pi) = 1. Throws NonErgodicError
// when the chain is not irreducible and std::invalid_argument when the input
// is not square or its rows do not sum to one.
Eigen::VectorXd solve_stationary(const TransitionMatrix& transitions);

// True when every state reaches every other through positive entries.
bool is_irreducible(const TransitionMatrix& transitions);

// De Bruijn availability graph over k-bit uptime histories. A state's bits
// are read oldest (most significant) to newest (least significant).
class Dbg {
 public:
  static constexpr unsigned kMaxStateSize = 16;

  explicit Dbg(unsigned stateSize);

  unsigned state_size() const { return k_; }
  std::size_t state_count() const { return std::size_t{1} << k_; }

  // Records one status bit and returns the resulting online probability.
  double update(bool status);

  // Stationary online probability of the current chain, the degenerate 0/1
  // value for absorbing classes, or the warm-up online fraction before the
  // first transition is recorded.
  double sop() const;

  bool warmed_up() const;
  std::uint32_t current_state() const { return current_; }
  std::uint64_t bits_seen() const { return seen_; }
  // Last min(bits_seen, 64) status bits, newest in the least significant bit.
  std::uint64_t history() const { return history_; }

  std::uint64_t visit_count(std::uint32_t state) const { return visits_.at(state); }
  double transition_count(std::uint32_t state, bool bit) const { return transitions_.at(state)[bit ? 1 : 0]; }
  // Empirical p^bit of a state; empty when no transition left it.
  std::optional<double> transition_probability(std::uint32_t state, bool bit) const;

  std::uint32_t successor(std::uint32_t state, bool bit) const {
    return ((state << 1) | static_cast<std::uint32_t>(bit)) & mask();
  }

  // Each state b1..bk maps to b1..bk0 and b1..bk1, both inheriting the
  // parent's transition counts; visit counts split evenly with the odd one
  // to the 0 child.
  Dbg enlarge() const;
  // States b1..b(k-1)0 and b1..b(k-1)1 merge into b1..b(k-1); merged
  // transition probabilities are the mean of the sources'. Requires k >= 2.
  Dbg shrink() const;

  void set_counts(std::uint32_t state, std::uint64_t visits, double toZero, double toOne);

 private:
  std::uint32_t mask() const { return static_cast<std::uint32_t>(state_count() - 1); }
  void sync_current_from_history();

  unsigned k_;
  std::uint32_t current_ = 0;
  std::uint64_t seen_ = 0;
  std::uint64_t ones_ = 0;
  std::uint64_t history_ = 0;
  std::vector<std::uint64_t> visits_;
  std::vector<std::array<double, 2>> transitions_;
};

}  // namespace sgchurn
