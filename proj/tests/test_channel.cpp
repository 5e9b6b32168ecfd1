#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "uavdc/channel.hpp"

using namespace uavdc;

namespace {

// Expected values below were evaluated independently in double precision
// (Python math module) and frozen here.
constexpr double kRateAtZero = 6.804877942711852e7;   // 5e6 * log2(1 + 12500)
constexpr double kRateAtTen = 6.643928320920272e7;    // 5e6 * log2(1 + 10000)
constexpr double kLosProb90 = 0.999975074537903;      // a = 9.61, b = 0.16, theta = 90
constexpr double kGainAt50 = 1.8292202077093042e-08;  // 1e-4 * 50^-2.2

SensorNode node_at(Vec2 p, double gain = 1e-5) {
  SensorNode n;
  n.position = p;
  n.gain_alpha = gain;
  return n;
}

ScenarioConfig probabilistic_config() {
  ScenarioConfig cfg = reference_config();
  cfg.channel_kind = ChannelKind::probabilistic_los;
  return cfg;
}

}  // namespace

TEST(LinkRate, OverheadReferenceValue) {
  const ScenarioConfig cfg = reference_config();
  EXPECT_NEAR(link_rate(node_at({5, 5}), {5, 5}, cfg), kRateAtZero, 1e-6 * kRateAtZero);
}

TEST(LinkRate, TenMetersOut) {
  const ScenarioConfig cfg = reference_config();
  EXPECT_NEAR(link_rate(node_at({0, 0}), {6, 8}, cfg), kRateAtTen, 1e-6 * kRateAtTen);
}

TEST(LinkRate, ZeroPowerGivesZeroRate) {
  ScenarioConfig cfg = reference_config();
  cfg.tx_power_p = 0.0;
  EXPECT_EQ(link_rate(node_at({0, 0}), {3, 4}, cfg), 0.0);
}

TEST(LinkRate, MonotoneNonIncreasingInDistance) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    ScenarioConfig cfg = reference_config();
    cfg.altitude_h = 1.0 + 100.0 * u(rng);
    cfg.bandwidth_w = 1e5 + 1e7 * u(rng);
    cfg.noise_power = std::pow(10.0, -16.0 + 4.0 * u(rng));
    const double gain = std::pow(10.0, -7.0 + 4.0 * u(rng));
    double previous = link_rate(gain, 0.0, cfg);
    for (double d = 0.5; d <= 200.0; d += 0.5) {
      const double r = link_rate(gain, d, cfg);
      EXPECT_LE(r, previous);
      previous = r;
    }
  }
}

TEST(IsReliable, ClosedBoundary) {
  const ScenarioConfig cfg = reference_config();
  EXPECT_TRUE(is_reliable(Vec2{0, 0}, Vec2{10, 0}, cfg));
  EXPECT_FALSE(is_reliable(Vec2{0, 0}, Vec2{10 + 1e-9, 0}, cfg));
  EXPECT_TRUE(is_reliable(Vec2{4, 4}, Vec2{4, 4}, cfg));
}

TEST(ElevationAngle, Values) {
  EXPECT_NEAR(elevation_angle({0, 0}, {{20, 0}, 20}), 45.0, 1e-12);
  EXPECT_EQ(elevation_angle({3, 3}, {{3, 3}, 20}), 90.0);
  EXPECT_NEAR(elevation_angle({0, 0}, {{20 * std::sqrt(3.0), 0}, 20}), 30.0, 1e-12);
}

TEST(LosProbability, AtThetaEqualToA) {
  EXPECT_DOUBLE_EQ(los_probability(9.61, 9.61, 0.16), 1.0 / (1.0 + 9.61));
}

TEST(LosProbability, UrbanParametersOverhead) {
  EXPECT_NEAR(los_probability(90.0, 9.61, 0.16), kLosProb90, 1e-15);
}

TEST(LosProbability, FlatWhenBIsZero) {
  for (double theta = 0.0; theta <= 90.0; theta += 7.5)
    EXPECT_DOUBLE_EQ(los_probability(theta, 4.0, 0.0), 1.0 / 5.0);
}

TEST(LosProbability, StrictlyIncreasingAndBounded) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ua(0.1, 20.0), ub(0.01, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double a = ua(rng), b = ub(rng);
    double previous = los_probability(0.0, a, b);
    EXPECT_GT(previous, 0.0);
    for (double theta = 0.25; theta <= 90.0; theta += 0.25) {
      const double p = los_probability(theta, a, b);
      // Steep curves saturate to 1.0 in double precision.
      if (previous < 1.0 - 1e-12) {
        EXPECT_GT(p, previous) << "a=" << a << " b=" << b << " theta=" << theta;
      }
      EXPECT_GE(p, previous);
      EXPECT_LE(p, 1.0);
      previous = p;
    }
  }
}

TEST(ChannelGain, ReferenceDistance) {
  LosParams params;
  params.beta0 = 3e-4;
  params.mu = 0.25;
  EXPECT_DOUBLE_EQ(channel_gain({0, 0}, {{0, 0}, 1.0}, true, params), 3e-4);
  EXPECT_DOUBLE_EQ(channel_gain({0, 0}, {{0, 0}, 1.0}, false, params), 0.25 * 3e-4);
}

TEST(ChannelGain, PowerLawValue) {
  LosParams params;
  params.beta0 = 1e-4;
  params.alpha_l = 2.2;
  EXPECT_NEAR(channel_gain({0, 0}, {{30, 0}, 40}, true, params), kGainAt50, 1e-12 * kGainAt50);
}

TEST(ChannelGain, ZeroDistanceRejected) {
  EXPECT_THROW(channel_gain({1, 1}, {{1, 1}, 0.0}, true, LosParams{}), std::domain_error);
}

TEST(ChannelGain, LosDominatesNlos) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    LosParams params;
    params.mu = 0.01 + 0.99 * u(rng);
    params.alpha_l = 1.5 + 2.0 * u(rng);
    params.alpha_n = params.alpha_l + 2.0 * u(rng);
    const Vec3 uav{{100 * u(rng), 100 * u(rng)}, 1.0 + 100 * u(rng)};  // d >= 1
    EXPECT_GE(channel_gain({0, 0}, uav, true, params), channel_gain({0, 0}, uav, false, params));
  }
}

TEST(ProbLinkRate, CertainLosAlwaysTakesLosBranch) {
  ScenarioConfig cfg = probabilistic_config();
  cfg.los_params.a = 1e-12;  // P_LoS -> 1
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) EXPECT_TRUE(prob_link_rate(Vec2{0, 0}, Vec3{{0, 0}, 20}, cfg, rng).los_flag);
}

TEST(ProbLinkRate, ReducesToFixedAltitudeFormAtReferenceDistance) {
  ScenarioConfig cfg = probabilistic_config();
  cfg.los_params.a = 1e-12;
  cfg.los_params.gamma = 1.0;
  cfg.los_params.beta0 = 1e-5;
  cfg.altitude_h = 1.0;
  Rng rng(3);
  const LinkSample s = prob_link_rate(Vec2{0, 0}, Vec3{{0, 0}, 1.0}, cfg, rng);
  ASSERT_TRUE(s.los_flag);
  EXPECT_DOUBLE_EQ(s.gain_h, 1e-5);
  EXPECT_NEAR(s.rate_bps, link_rate(1e-5, 0.0, cfg), 1e-12 * s.rate_bps);
  EXPECT_TRUE(s.reliable);
}

TEST(ProbLinkRate, EmpiricalLosFractionMatchesClosedForm) {
  const ScenarioConfig cfg = probabilistic_config();
  const Vec2 node{0, 0};
  const Vec3 uav{{25, 10}, 30};
  const double expected = los_probability(elevation_angle(node, uav), cfg.los_params.a, cfg.los_params.b);
  Rng rng(99);
  int los = 0;
  constexpr int kSamples = 100000;
  for (int i = 0; i < kSamples; ++i) los += prob_link_rate(node, uav, cfg, rng).los_flag;
  EXPECT_NEAR(static_cast<double>(los) / kSamples, expected, 0.01);
}

TEST(ProbLinkRate, DegeneratePowerLawMatchesDirectEvaluation) {
  ScenarioConfig cfg = probabilistic_config();
  cfg.los_params.mu = 1.0;
  cfg.los_params.alpha_l = 2.5;
  cfg.los_params.alpha_n = 2.5;
  cfg.los_params.gamma = 1.0;
  std::mt19937_64 geom(1);
  std::uniform_real_distribution<double> u(0.0, 60.0);
  Rng rng(2);
  for (int trial = 0; trial < 500; ++trial) {
    const Vec2 node{u(geom), u(geom)};
    const Vec3 uav{{u(geom), u(geom)}, 5.0 + u(geom)};
    const double d2 = squared_distance(node, uav.xy) + uav.z * uav.z;
    const double direct = cfg.bandwidth_w *
                          std::log2(1.0 + cfg.los_params.beta0 * std::pow(d2, -1.25) * cfg.tx_power_p / cfg.noise_power);
    const double sampled = prob_link_rate(node, uav, cfg, rng).rate_bps;
    EXPECT_NEAR(sampled, direct, 1e-12 * direct);
  }
}

TEST(ExpectedLinkRate, MixesBranchesByLosProbability) {
  const ScenarioConfig cfg = probabilistic_config();
  const Vec2 node{0, 0};
  const Vec3 uav{{15, 5}, 40};
  const double p = los_probability(elevation_angle(node, uav), cfg.los_params.a, cfg.los_params.b);
  const double r_l = gain_rate(channel_gain(node, uav, true, cfg.los_params), cfg);
  const double r_n = gain_rate(channel_gain(node, uav, false, cfg.los_params), cfg);
  EXPECT_DOUBLE_EQ(expected_link_rate(node, uav, cfg), p * r_l + (1 - p) * r_n);
  EXPECT_GT(r_l, r_n);
}
