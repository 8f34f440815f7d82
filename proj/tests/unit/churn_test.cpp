#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "sgchurn/churn.hpp"
#include "sgchurn/errors.hpp"

using namespace sgchurn;

TEST(Churn, WeibullMeanAndVariance) {
  const ChurnModel m;
  Rng rng(1);
  const int n = 1000000;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double h = draw_session_hours(m, rng);
    sum += h;
    sq += h * h;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  const double lambda = m.weibull_scale_hours();
  const double k = m.sessionShape;
  const double g1 = std::tgamma(1 + 1 / k);
  const double analyticVar = lambda * lambda * (std::tgamma(1 + 2 / k) - g1 * g1);
  EXPECT_NEAR(mean, 2.71, 0.01 * 2.71);
  EXPECT_NEAR(var, analyticVar, 0.01 * analyticVar);
}

TEST(Churn, ShapeOneIsExponential) {
  ChurnModel m;
  m.sessionShape = 1.0;
  EXPECT_NEAR(m.weibull_scale_hours(), 2.71, 1e-12);
  Rng rng(2);
  double sum = 0.0;
  for (int i = 0; i < 200000; ++i) sum += draw_session_hours(m, rng);
  EXPECT_NEAR(sum / 200000, 2.71, 0.03);
}

TEST(Churn, SessionLengthAtLeastOneSlot) {
  const ChurnModel m;
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) EXPECT_GE(draw_session_length(m, rng), 1U);
}

TEST(Churn, ArrivalMean) {
  const ChurnModel m;
  Rng rng(4);
  double sum = 0;
  for (int i = 0; i < 100000; ++i) sum += static_cast<double>(draw_arrival_count(m, rng));
  EXPECT_NEAR(sum / 100000, 3600.0 / 39.86, 1.0);
  EXPECT_NEAR(sum / 100000, 90.3, 1.0);
}

TEST(Churn, DeterministicArrivals) {
  ChurnModel m;
  m.arrivals = ArrivalProcess::Deterministic;
  Rng rng(5);
  EXPECT_EQ(draw_arrival_count(m, rng), 90U);
}

TEST(Churn, InfiniteInterarrivalGivesNoArrivals) {
  ChurnModel m;
  m.interarrivalMeanSeconds = std::numeric_limits<double>::infinity();
  Rng rng(6);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(draw_arrival_count(m, rng), 0U);
}

TEST(Churn, FixedSeedReproduces) {
  const ChurnModel m;
  Rng a(9);
  Rng b(9);
  for (int i = 0; i < 1000; ++i) {
    ASSERT_EQ(draw_session_length(m, a), draw_session_length(m, b));
    ASSERT_EQ(draw_arrival_count(m, a), draw_arrival_count(m, b));
  }
}

TEST(Churn, UniformModel) {
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_TRUE(uniform_churn_online(0.0, rng));
    EXPECT_FALSE(uniform_churn_online(1.0, rng));
  }
  double total = 0;
  for (int s = 0; s < 10000; ++s) {
    for (int n = 0; n < 1024; ++n) total += uniform_churn_online(0.82, rng) ? 1 : 0;
  }
  EXPECT_NEAR(total / 10000, 184.32, 2.0);
}

TEST(Churn, Validation) {
  ChurnModel m;
  m.sessionShape = 0;
  EXPECT_THROW(m.validate(), ConfigError);
  m = ChurnModel{};
  m.uniformQ = 1.5;
  EXPECT_THROW(m.validate(), ConfigError);
  EXPECT_EQ(parse_churn_kind("uniform"), ChurnKind::Uniform);
  EXPECT_THROW(parse_churn_kind("trace"), ConfigError);
}
