#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "uavdc/model.hpp"

namespace uavdc {

struct LinkSample {
  double rate_bps{0.0};
  bool reliable{false};
  bool los_flag{false};
  double gain_h{0.0};
};

/// W log2(1 + gain * p / (sigma^2 (H^2 + d^2))) for a ground distance `d_proj`.
inline double link_rate(double gain_alpha, double d_proj, const ScenarioConfig& cfg) {
  const double h2 = cfg.altitude_h * cfg.altitude_h;
  const double snr = gain_alpha * cfg.tx_power_p / (cfg.noise_power * (h2 + d_proj * d_proj));
  return cfg.bandwidth_w * std::log2(1.0 + snr);
}

/// Fixed-altitude LoS rate of `node` toward a UAV hovering over `uav_xy`.
inline double link_rate(const SensorNode& node, Vec2 uav_xy, const ScenarioConfig& cfg) {
  return link_rate(node.gain_alpha, distance(node.position, uav_xy), cfg);
}

/// Closed disk: a node exactly d_c away still counts as reliable.
inline bool is_reliable(Vec2 node_xy, Vec2 uav_xy, const ScenarioConfig& cfg) {
  return distance(node_xy, uav_xy) <= cfg.comm_radius_dc;
}

inline bool is_reliable(const SensorNode& node, Vec2 uav_xy, const ScenarioConfig& cfg) {
  return is_reliable(node.position, uav_xy, cfg);
}

/// Elevation of the UAV as seen from the node, in degrees. 90 when directly overhead.
inline double elevation_angle(Vec2 node_xy, Vec3 uav) {
  const double d_proj = distance(node_xy, uav.xy);
  if (d_proj == 0.0) return 90.0;
  return 180.0 / std::numbers::pi * std::atan(uav.z / d_proj);
}

/// Sigmoid LoS probability 1 / (1 + a exp(-b (theta - a))).
inline double los_probability(double theta_deg, double a, double b) {
  return 1.0 / (1.0 + a * std::exp(-b * (theta_deg - a)));
}

/// Large-scale power gain: beta0 d^-alpha_L under LoS, mu beta0 d^-alpha_N otherwise.
inline double channel_gain(Vec2 node_xy, Vec3 uav, bool los, const LosParams& params) {
  const double d = std::sqrt(squared_distance(node_xy, uav.xy) + uav.z * uav.z);
  if (!(d > 0.0)) throw std::domain_error("channel_gain: UAV coincides with the node (zero distance)");
  return los ? params.beta0 * std::pow(d, -params.alpha_l)
             : params.mu * params.beta0 * std::pow(d, -params.alpha_n);
}

/// Rate achieved through a large-scale gain `h` with SNR gap Gamma.
inline double gain_rate(double gain_h, const ScenarioConfig& cfg) {
  const double snr = gain_h * cfg.tx_power_p / (cfg.noise_power * cfg.los_params.gamma);
  return cfg.bandwidth_w * std::log2(1.0 + snr);
}

/// Draws the LoS state for one (node, slot) and returns the resulting link.
inline LinkSample prob_link_rate(Vec2 node_xy, Vec3 uav, const ScenarioConfig& cfg, Rng& rng) {
  const LosParams& los = cfg.los_params;
  const double p_los = los_probability(elevation_angle(node_xy, uav), los.a, los.b);
  std::bernoulli_distribution coin(p_los);

  LinkSample sample;
  sample.los_flag = coin(rng);
  sample.gain_h = channel_gain(node_xy, uav, sample.los_flag, los);
  sample.rate_bps = gain_rate(sample.gain_h, cfg);
  sample.reliable = is_reliable(node_xy, uav.xy, cfg) && sample.rate_bps > 0.0;
  return sample;
}

inline LinkSample prob_link_rate(const SensorNode& node, Vec3 uav, const ScenarioConfig& cfg, Rng& rng) {
  return prob_link_rate(node.position, uav, cfg, rng);
}

/// P_LoS r_LoS + (1 - P_LoS) r_NLoS at a fixed 3-D position.
inline double expected_link_rate(Vec2 node_xy, Vec3 uav, const ScenarioConfig& cfg) {
  const LosParams& los = cfg.los_params;
  const double p_los = los_probability(elevation_angle(node_xy, uav), los.a, los.b);
  const double r_los = gain_rate(channel_gain(node_xy, uav, true, los), cfg);
  const double r_nlos = gain_rate(channel_gain(node_xy, uav, false, los), cfg);
  return p_los * r_los + (1.0 - p_los) * r_nlos;
}

}  // namespace uavdc
