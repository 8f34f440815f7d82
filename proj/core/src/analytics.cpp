#include "sgchurn/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sgchurn {

double candidate_probability(std::size_t n) {
  if (n == 0) throw std::invalid_argument("candidate_probability: n must be >= 1");
  const double nd = static_cast<double>(n);
  double sum = 0.0;
  for (std::size_t x = 0; x <= n; ++x) {
    const double denom = nd - static_cast<double>(x) + 1.0;
    double inner = 0.0;
    for (std::size_t t = x; t <= n; ++t) inner += static_cast<double>(t - x) / denom;
    sum += inner;
  }
  return sum / (nd * nd);
}

double candidate_probability_fast(std::size_t n) {
  if (n == 0) throw std::invalid_argument("candidate_probability: n must be >= 1");
  const double nd = static_cast<double>(n);
  double sum = 0.0;
  for (std::size_t x = 0; x <= n; ++x) {
    // sum_{t=x}^{n} (t-x) = m(m-1)/2 with m = n-x+1 terms
    const double m = nd - static_cast<double>(x) + 1.0;
    sum += (m - 1.0) / 2.0;
  }
  return sum / (nd * nd);
}

double effective_probability(double p, double q) {
  if (!(p >= 0.0 && p <= 1.0) || !(q >= 0.0 && q <= 1.0)) {
    throw std::invalid_argument("effective_probability: arguments must lie in [0, 1]");
  }
  return p * (1.0 - q);
}

double failure_probability(double pEffective, std::size_t b) {
  if (!(pEffective >= 0.0 && pEffective <= 1.0)) {
    throw std::invalid_argument("failure_probability: p' must lie in [0, 1]");
  }
  return std::pow(1.0 - pEffective, static_cast<double>(b));
}

double expected_failure_path(double pFailure) {
  if (!(pFailure > 0.0 && pFailure <= 1.0)) {
    throw std::invalid_argument("expected_failure_path: p_f must lie in (0, 1]");
  }
  return 1.0 / pFailure;
}

double expected_online(std::size_t n, double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("expected_online: q must lie in [0, 1]");
  return (1.0 - q) * static_cast<double>(n);
}

std::size_t estimate_backup_size(std::size_t n, double q, double targetPathLen) {
  if (!(q >= 0.0 && q < 1.0)) {
    if (q == 1.0) throw std::domain_error("no online candidates possible");
    throw std::invalid_argument("estimate_backup_size: q must lie in [0, 1)");
  }
  if (!(targetPathLen > 1.0)) return 0;
  const double pe = effective_probability(candidate_probability(n), q);
  if (pe <= 0.0) throw std::domain_error("no online candidates possible");
  if (pe >= 1.0) return 1;
  // first guess from the closed form, then walk to the exact boundary
  auto ef = [&](std::size_t b) { return expected_failure_path(failure_probability(pe, b)); };
  std::size_t b = static_cast<std::size_t>(std::max(0.0, std::floor(std::log(targetPathLen) / -std::log1p(-pe))));
  while (b > 0 && ef(b - 1) >= targetPathLen) --b;
  while (ef(b) < targetPathLen) ++b;
  return b;
}

unsigned estimate_search_path_bound(std::size_t onlineCount) {
  if (onlineCount == 0) throw std::invalid_argument("estimate_search_path_bound: online count must be >= 1");
  return static_cast<unsigned>(std::ceil(std::log2(static_cast<double>(onlineCount))));
}

}  // namespace sgchurn
