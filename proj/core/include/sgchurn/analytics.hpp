#pragma once

#include <cstddef>

namespace sgchurn {

struct AnalyticalParams {
  std::size_t n = 1024;
  double q = 0.82;
  std::size_t b = 40;
  double targetPathLen = 8.0;
};

// Probability that a backup element is a routing candidate towards a target,
// by the exact double sum over the executor rank x and target rank t.
double candidate_probability(std::size_t n);
// Same value with the inner sum reduced to closed form, O(n).
double candidate_probability_fast(std::size_t n);

double effective_probability(double p, double q);
double failure_probability(double pEffective, std::size_t b);
double expected_failure_path(double pFailure);
double expected_online(std::size_t n, double q);
std::size_t estimate_backup_size(std::size_t n, double q, double targetPathLen);
unsigned estimate_search_path_bound(std::size_t onlineCount);

}  // namespace sgchurn
