#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace sgchurn {

enum class ChurnKind { Debian, Uniform };
enum class ArrivalProcess { Poisson, Deterministic };

ChurnKind parse_churn_kind(std::string_view name);
std::string to_string(ChurnKind kind);

inline constexpr double kSlotSeconds = 3600.0;

struct ChurnModel {
  double sessionShape = 0.59;
  double sessionMeanHours = 2.71;
  double interarrivalMeanSeconds = 39.86;
  ChurnKind kind = ChurnKind::Debian;
  double uniformQ = 0.82;
  ArrivalProcess arrivals = ArrivalProcess::Poisson;

  // Throws ConfigError naming the offending key.
  void validate() const;
  double weibull_scale_hours() const;
  double mean_arrivals_per_slot() const { return kSlotSeconds / interarrivalMeanSeconds; }
};

using Rng = std::mt19937_64;

// Session length in hours before slotting.
double draw_session_hours(const ChurnModel& model, Rng& rng);
// Whole slots, at least one.
std::size_t draw_session_length(const ChurnModel& model, Rng& rng);
std::size_t draw_arrival_count(const ChurnModel& model, Rng& rng);
bool uniform_churn_online(double q, Rng& rng);

}  // namespace sgchurn
