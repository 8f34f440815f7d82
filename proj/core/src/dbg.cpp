#include "sgchurn/dbg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "sgchurn/errors.hpp"

namespace sgchurn {

namespace {

constexpr double kRowSumTolerance = 1e-9;

// Forward reachability over positive entries from `start`.
std::vector<bool> reachable_from(const TransitionMatrix& p, Eigen::Index start, bool reverse) {
  const Eigen::Index m = p.rows();
  std::vector<bool> seen(static_cast<std::size_t>(m), false);
  std::vector<Eigen::Index> stack{start};
  seen[static_cast<std::size_t>(start)] = true;
  while (!stack.empty()) {
    const Eigen::Index i = stack.back();
    stack.pop_back();
    for (Eigen::Index j = 0; j < m; ++j) {
      const double w = reverse ? p(j, i) : p(i, j);
      if (w > 0.0 && !seen[static_cast<std::size_t>(j)]) {
        seen[static_cast<std::size_t>(j)] = true;
        stack.push_back(j);
      }
    }
  }
  return seen;
}

// Strongly connected components of a small directed graph (iterative Tarjan).
// Returns the component id of each vertex.
std::vector<int> strongly_connected_components(const std::vector<std::vector<int>>& adj, int& componentCount) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<bool> onStack(n, false);
  std::vector<int> stack;
  int counter = 0;
  componentCount = 0;

  struct Frame {
    int v;
    std::size_t next;
  };
  for (int root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    std::vector<Frame> frames{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    onStack[root] = true;
    while (!frames.empty()) {
      Frame& f = frames.back();
      if (f.next < adj[f.v].size()) {
        const int w = adj[f.v][f.next++];
        if (index[w] == -1) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          onStack[w] = true;
          frames.push_back({w, 0});
        } else if (onStack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      const int v = f.v;
      if (low[v] == index[v]) {
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          onStack[w] = false;
          comp[w] = componentCount;
        } while (w != v);
        ++componentCount;
      }
      frames.pop_back();
      if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
    }
  }
  return comp;
}

double chain_online_probability(const Dbg& dbg) {
  const std::uint32_t start = dbg.current_state();
  const std::size_t total = dbg.state_count();

  // Restrict the chain to states reachable from the current one.
  std::vector<int> local(total, -1);
  std::vector<std::uint32_t> states{start};
  local[start] = 0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (bool bit : {false, true}) {
      if (dbg.transition_count(states[i], bit) <= 0.0) continue;
      const std::uint32_t next = dbg.successor(states[i], bit);
      if (local[next] == -1) {
        local[next] = static_cast<int>(states.size());
        states.push_back(next);
      }
    }
  }

  const int m = static_cast<int>(states.size());
  TransitionMatrix p = TransitionMatrix::Zero(m, m);
  std::vector<std::vector<int>> adj(m);
  for (int i = 0; i < m; ++i) {
    const std::uint32_t s = states[i];
    for (bool bit : {false, true}) {
      if (auto prob = dbg.transition_probability(s, bit); prob && *prob > 0.0) {
        const int j = local[dbg.successor(s, bit)];
        p(i, j) += *prob;
        adj[i].push_back(j);
      }
    }
  }

  int componentCount = 0;
  const std::vector<int> comp = strongly_connected_components(adj, componentCount);
  std::vector<bool> terminal(componentCount, true);
  for (int i = 0; i < m; ++i) {
    for (int j : adj[i]) {
      if (comp[j] != comp[i]) terminal[comp[i]] = false;
    }
  }

  // Online probability of each terminal class.
  std::vector<double> value(componentCount, 0.0);
  for (int c = 0; c < componentCount; ++c) {
    if (!terminal[c]) continue;
    std::vector<int> members;
    bool anyOnline = false, anyOffline = false;
    for (int i = 0; i < m; ++i) {
      if (comp[i] != c) continue;
      members.push_back(i);
      ((states[i] & 1U) ? anyOnline : anyOffline) = true;
    }
    if (!anyOffline) {
      value[c] = 1.0;
    } else if (!anyOnline) {
      value[c] = 0.0;
    } else {
      const auto sz = static_cast<Eigen::Index>(members.size());
      TransitionMatrix sub(sz, sz);
      for (Eigen::Index a = 0; a < sz; ++a) {
        for (Eigen::Index b = 0; b < sz; ++b) sub(a, b) = p(members[a], members[b]);
      }
      const Eigen::VectorXd pi = solve_stationary(sub);
      double online = 0.0;
      for (Eigen::Index a = 0; a < sz; ++a) {
        if (states[members[a]] & 1U) online += pi(a);
      }
      value[c] = online;
    }
  }

  if (terminal[comp[0]]) return value[comp[0]];

  // Transient start: weight each terminal class by its absorption probability.
  std::vector<int> transient;
  std::vector<int> tIndex(m, -1);
  for (int i = 0; i < m; ++i) {
    if (!terminal[comp[i]]) {
      tIndex[i] = static_cast<int>(transient.size());
      transient.push_back(i);
    }
  }
  const auto t = static_cast<Eigen::Index>(transient.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(t, t);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(t);
  for (Eigen::Index row = 0; row < t; ++row) {
    const int i = transient[row];
    for (int j = 0; j < m; ++j) {
      if (p(i, j) <= 0.0) continue;
      if (tIndex[j] >= 0) {
        a(row, tIndex[j]) -= p(i, j);
      } else {
        r(row) += p(i, j) * value[comp[j]];
      }
    }
  }
  const Eigen::VectorXd v = a.partialPivLu().solve(r);
  return std::clamp(v(tIndex[0]), 0.0, 1.0);
}

}  // namespace

bool is_irreducible(const TransitionMatrix& transitions) {
  if (transitions.rows() == 0) return false;
  const auto fwd = reachable_from(transitions, 0, false);
  const auto bwd = reachable_from(transitions, 0, true);
  return std::all_of(fwd.begin(), fwd.end(), [](bool b) { return b; }) &&
         std::all_of(bwd.begin(), bwd.end(), [](bool b) { return b; });
}

Eigen::VectorXd solve_stationary(const TransitionMatrix& transitions) {
  const Eigen::Index m = transitions.rows();
  if (m == 0 || transitions.cols() != m) {
    throw std::invalid_argument("solve_stationary: transition matrix must be square and non-empty");
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    if ((transitions.row(i).array() < 0.0).any() || std::abs(transitions.row(i).sum() - 1.0) > kRowSumTolerance) {
      throw std::invalid_argument("solve_stationary: row " + std::to_string(i) + " is not a probability vector");
    }
  }
  if (!is_irreducible(transitions)) throw NonErgodicError();

  Eigen::MatrixXd a = transitions.transpose() - Eigen::MatrixXd::Identity(m, m);
  a.row(m - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
  b(m - 1) = 1.0;
  const auto lu = a.partialPivLu();
  Eigen::VectorXd pi = lu.solve(b);
  // One refinement step keeps the residual near machine precision.
  pi += lu.solve(b - a * pi);
  return pi;
}

Dbg::Dbg(unsigned stateSize) : k_(stateSize) {
  if (stateSize < 1 || stateSize > kMaxStateSize) {
    throw std::invalid_argument("DBG state size must be in [1, " + std::to_string(kMaxStateSize) + "]");
  }
  visits_.assign(state_count(), 0);
  transitions_.assign(state_count(), {0.0, 0.0});
}

bool Dbg::warmed_up() const {
  if (seen_ < k_) return false;
  return std::any_of(transitions_.begin(), transitions_.end(), [](const auto& t) { return t[0] + t[1] > 0.0; });
}

double Dbg::update(bool status) {
  if (seen_ >= k_) transitions_[current_][status ? 1 : 0] += 1.0;
  history_ = (history_ << 1) | static_cast<std::uint64_t>(status);
  ++seen_;
  ones_ += status ? 1 : 0;
  if (seen_ >= k_) {
    current_ = static_cast<std::uint32_t>(history_) & mask();
    ++visits_[current_];
  }
  return sop();
}

double Dbg::sop() const {
  if (!warmed_up()) return seen_ == 0 ? 0.0 : static_cast<double>(ones_) / static_cast<double>(seen_);
  return chain_online_probability(*this);
}

std::optional<double> Dbg::transition_probability(std::uint32_t state, bool bit) const {
  const auto& t = transitions_.at(state);
  const double total = t[0] + t[1];
  if (total <= 0.0) return std::nullopt;
  return t[bit ? 1 : 0] / total;
}

void Dbg::set_counts(std::uint32_t state, std::uint64_t visits, double toZero, double toOne) {
  if (toZero < 0.0 || toOne < 0.0) throw std::invalid_argument("transition counts must be non-negative");
  visits_.at(state) = visits;
  transitions_.at(state) = {toZero, toOne};
}

void Dbg::sync_current_from_history() {
  current_ = seen_ >= k_ ? static_cast<std::uint32_t>(history_) & mask() : 0U;
}

Dbg Dbg::enlarge() const {
  Dbg out(k_ + 1);
  out.seen_ = seen_;
  out.ones_ = ones_;
  out.history_ = history_;
  for (std::uint32_t s = 0; s < state_count(); ++s) {
    const std::uint64_t v = visits_[s];
    const std::uint32_t zeroChild = s << 1;
    const std::uint32_t oneChild = zeroChild | 1U;
    out.transitions_[zeroChild] = transitions_[s];
    out.transitions_[oneChild] = transitions_[s];
    out.visits_[zeroChild] = v / 2 + v % 2;
    out.visits_[oneChild] = v / 2;
  }
  out.sync_current_from_history();
  return out;
}

Dbg Dbg::shrink() const {
  if (k_ < 2) throw std::invalid_argument("cannot shrink a DBG of state size 1");
  Dbg out(k_ - 1);
  out.seen_ = seen_;
  out.ones_ = ones_;
  out.history_ = history_;
  for (std::uint32_t merged = 0; merged < out.state_count(); ++merged) {
    const auto& a = transitions_[merged << 1];
    const auto& b = transitions_[(merged << 1) | 1U];
    const double ta = a[0] + a[1];
    const double tb = b[0] + b[1];
    out.visits_[merged] = visits_[merged << 1] + visits_[(merged << 1) | 1U];
    if (ta > 0.0 && tb > 0.0) {
      const double pOne = 0.5 * (a[1] / ta + b[1] / tb);
      const double mass = ta + tb;
      out.transitions_[merged] = {mass * (1.0 - pOne), mass * pOne};
    } else {
      out.transitions_[merged] = {a[0] + b[0], a[1] + b[1]};
    }
  }
  out.sync_current_from_history();
  return out;
}

}  // namespace sgchurn
