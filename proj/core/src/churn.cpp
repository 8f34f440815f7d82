#include "sgchurn/churn.hpp"

#include <cmath>

#include "sgchurn/errors.hpp"

namespace sgchurn {

ChurnKind parse_churn_kind(std::string_view name) {
  if (name == "debian") return ChurnKind::Debian;
  if (name == "uniform") return ChurnKind::Uniform;
  throw ConfigError("churn-kind: unknown kind '" + std::string(name) + "' (expected debian|uniform)");
}

std::string to_string(ChurnKind kind) { return kind == ChurnKind::Debian ? "debian" : "uniform"; }

void ChurnModel::validate() const {
  if (!(sessionShape > 0.0) || !std::isfinite(sessionShape)) throw ConfigError("session-shape must be > 0");
  if (!(sessionMeanHours > 0.0) || !std::isfinite(sessionMeanHours)) {
    throw ConfigError("session-mean-hours must be > 0");
  }
  if (!(interarrivalMeanSeconds > 0.0)) throw ConfigError("interarrival-mean-seconds must be > 0");
  if (!(uniformQ >= 0.0 && uniformQ <= 1.0)) throw ConfigError("uniform-q must lie in [0, 1]");
}

double ChurnModel::weibull_scale_hours() const { return sessionMeanHours / std::tgamma(1.0 + 1.0 / sessionShape); }

double draw_session_hours(const ChurnModel& model, Rng& rng) {
  std::weibull_distribution<double> dist(model.sessionShape, model.weibull_scale_hours());
  return dist(rng);
}

std::size_t draw_session_length(const ChurnModel& model, Rng& rng) {
  const double hours = draw_session_hours(model, rng);
  const double slots = std::ceil(hours * 3600.0 / kSlotSeconds);
  return slots < 1.0 ? 1 : static_cast<std::size_t>(slots);
}

std::size_t draw_arrival_count(const ChurnModel& model, Rng& rng) {
  const double mean = model.mean_arrivals_per_slot();
  if (!(mean > 0.0)) return 0;
  if (model.arrivals == ArrivalProcess::Deterministic) return static_cast<std::size_t>(std::llround(mean));
  std::poisson_distribution<std::size_t> dist(mean);
  return dist(rng);
}

bool uniform_churn_online(double q, Rng& rng) {
  std::bernoulli_distribution online(1.0 - q);
  return online(rng);
}

}  // namespace sgchurn
