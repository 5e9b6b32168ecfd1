#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "uavdc/channel.hpp"
#include "uavdc/model.hpp"

namespace uavdc {

struct WaypointSolution {
  Vec2 waypoint;
  int iterations{0};
  double predicted_throughput_bits{0.0};  // sum of r_i tau_c at `waypoint`
  bool converged{false};
};

/// Convergence threshold on the waypoint update, in meters.
inline constexpr double kScaTolerance = 1e-6;
inline constexpr int kScaMaxIterations = 50;

/// Mean position of the served nodes.
inline Vec2 initial_waypoint(std::span<const SensorNode> served) {
  if (served.empty()) throw std::invalid_argument("initial_waypoint: no served nodes");
  Vec2 sum;
  for (const auto& node : served) sum = sum + node.position;
  return (1.0 / static_cast<double>(served.size())) * sum;
}

/// d r_i / d(d^2) at `ref_xy`: -W log2(e) G / (X^2 + G X) with X = H^2 + d^2
/// and G = alpha_i p / sigma^2. Strictly negative.
inline double rate_slope(const SensorNode& node, Vec2 ref_xy, const ScenarioConfig& cfg) {
  const double g = node.gain_alpha * cfg.tx_power_p / cfg.noise_power;
  const double x = cfg.altitude_h * cfg.altitude_h + squared_distance(node.position, ref_xy);
  return -cfg.bandwidth_w * std::numbers::log2e * g / (x * x + g * x);
}

/// Sum of true link rates times tau_c, i.e. bits a slot could move at `uav_xy`.
inline double throughput_at(std::span<const SensorNode> served, Vec2 uav_xy, const ScenarioConfig& cfg) {
  double total = 0.0;
  for (const auto& node : served) total += link_rate(node, uav_xy, cfg);
  return total * cfg.comm_tau_c;
}

/// Value of the rate sum linearized in squared distance around `ref_xy`,
/// evaluated at `probe`.
inline double linearized_rate_sum(std::span<const SensorNode> served, Vec2 ref_xy, Vec2 probe,
                                  const ScenarioConfig& cfg) {
  double total = 0.0;
  for (const auto& node : served) {
    const double delta = squared_distance(node.position, probe) - squared_distance(node.position, ref_xy);
    total += link_rate(node, ref_xy, cfg) + rate_slope(node, ref_xy, cfg) * delta;
  }
  return total;
}

/// Exact maximizer of the linearized objective inside the movement disk.
///
/// With w_i = -slope_i > 0 the surrogate is -sum w_i |L_i - x|^2 plus a
/// constant, an isotropic quadratic whose peak is the weighted centroid.
/// Radial projection onto the disk around `prev_xy` is then the constrained
/// optimum.
inline Vec2 sca_step(std::span<const SensorNode> served, Vec2 ref_xy, Vec2 prev_xy, const ScenarioConfig& cfg) {
  if (served.empty()) throw std::invalid_argument("sca_step: no served nodes");
  Vec2 weighted;
  double total_weight = 0.0;
  for (const auto& node : served) {
    const double w = -rate_slope(node, ref_xy, cfg);
    weighted = weighted + w * node.position;
    total_weight += w;
  }
  return project_onto_disk((1.0 / total_weight) * weighted, prev_xy, cfg.max_step());
}

/// Waypoint maximizing the served nodes' summed rate within one slot's flight.
///
/// Starts from the served nodes' centroid (pulled into the movement disk) and
/// repeats sca_step until the update falls below kScaTolerance or
/// kScaMaxIterations is hit. If the final point is worse on the true
/// objective than the start, the start is returned.
inline WaypointSolution solve_sp2(std::span<const SensorNode> served, Vec2 prev_xy, const ScenarioConfig& cfg) {
  const Vec2 start = project_onto_disk(initial_waypoint(served), prev_xy, cfg.max_step());

  WaypointSolution sol;
  Vec2 ref = start;
  while (sol.iterations < kScaMaxIterations) {
    const Vec2 next = sca_step(served, ref, prev_xy, cfg);
    ++sol.iterations;
    const double moved = distance(next, ref);
    ref = next;
    if (moved < kScaTolerance) {
      sol.converged = true;
      break;
    }
  }

  const double at_start = throughput_at(served, start, cfg);
  const double at_ref = throughput_at(served, ref, cfg);
  if (at_ref >= at_start) {
    sol.waypoint = ref;
    sol.predicted_throughput_bits = at_ref;
  } else {
    sol.waypoint = start;
    sol.predicted_throughput_bits = at_start;
  }
  return sol;
}

struct Disk {
  Vec2 center;
  double radius{0.0};
};

namespace detail {

/// Largest amount by which `x` lies outside any of `disks`.
inline double disk_violation(Vec2 x, std::span<const Disk> disks) {
  double worst = 0.0;
  for (const auto& d : disks) worst = std::max(worst, distance(x, d.center) - d.radius);
  return worst;
}

/// Points where two circles cross (zero, one or two).
inline std::vector<Vec2> circle_crossings(const Disk& a, const Disk& b) {
  const double d = distance(a.center, b.center);
  if (d == 0.0 || d > a.radius + b.radius || d < std::abs(a.radius - b.radius)) return {};
  const Vec2 unit = (1.0 / d) * (b.center - a.center);
  const double along = (d * d + a.radius * a.radius - b.radius * b.radius) / (2.0 * d);
  const double across = std::sqrt(std::max(0.0, a.radius * a.radius - along * along));
  const Vec2 base = a.center + along * unit;
  const Vec2 normal{-unit.y, unit.x};
  return {base + across * normal, base - across * normal};
}

}  // namespace detail

/// Euclidean projection of `p` onto the intersection of `disks`.
///
/// In the plane the projection is `p` itself, the projection onto a single
/// disk, or a crossing point of two boundary circles, so every candidate is
/// enumerated and the nearest feasible one kept. If the intersection is
/// empty the least-violating candidate is returned.
inline Vec2 project_onto_disks(Vec2 p, std::span<const Disk> disks) {
  constexpr double kSlack = 1e-12;
  std::vector<Vec2> candidates{p};
  for (const auto& d : disks) candidates.push_back(project_onto_disk(p, d.center, d.radius));
  for (std::size_t i = 0; i < disks.size(); ++i)
    for (std::size_t j = i + 1; j < disks.size(); ++j)
      for (const Vec2& x : detail::circle_crossings(disks[i], disks[j])) candidates.push_back(x);

  Vec2 best = p;
  double best_violation = std::numeric_limits<double>::infinity();
  double best_distance = std::numeric_limits<double>::infinity();
  for (const Vec2& x : candidates) {
    const double violation = std::max(0.0, detail::disk_violation(x, disks) - kSlack);
    const double dist = squared_distance(x, p);
    if (violation < best_violation || (violation == best_violation && dist < best_distance)) {
      best = x;
      best_violation = violation;
      best_distance = dist;
    }
  }
  return best;
}

/// Variant of solve_sp2 whose every iterate also keeps each served node
/// within d_c, so no scheduled node falls out of range at the waypoint.
inline WaypointSolution solve_sp2_covering(std::span<const SensorNode> served, Vec2 prev_xy,
                                           const ScenarioConfig& cfg) {
  // Service disks are shrunk by a nanometer so round-off in the projections
  // cannot leave a node a hair outside d_c.
  constexpr double kMargin = 1e-9;
  std::vector<Disk> feasible{{prev_xy, cfg.max_step()}};
  for (const auto& node : served)
    feasible.push_back({node.position, std::max(0.0, cfg.comm_radius_dc - kMargin)});

  auto step = [&](Vec2 ref) {
    Vec2 weighted;
    double total_weight = 0.0;
    for (const auto& node : served) {
      const double w = -rate_slope(node, ref, cfg);
      weighted = weighted + w * node.position;
      total_weight += w;
    }
    return project_onto_disks((1.0 / total_weight) * weighted, feasible);
  };

  const Vec2 start = project_onto_disks(initial_waypoint(served), feasible);
  WaypointSolution sol;
  Vec2 ref = start;
  while (sol.iterations < kScaMaxIterations) {
    const Vec2 next = step(ref);
    ++sol.iterations;
    const double moved = distance(next, ref);
    ref = next;
    if (moved < kScaTolerance) {
      sol.converged = true;
      break;
    }
  }
  // Crossing points carry round-off; the movement limit is hard.
  ref = project_onto_disk(ref, prev_xy, cfg.max_step());

  const double at_start = throughput_at(served, start, cfg);
  const double at_ref = throughput_at(served, ref, cfg);
  sol.waypoint = at_ref >= at_start ? ref : project_onto_disk(start, prev_xy, cfg.max_step());
  sol.predicted_throughput_bits = throughput_at(served, sol.waypoint, cfg);
  return sol;
}

inline Vec2 clip_to_area(Vec2 p, const ScenarioConfig& cfg) {
  return {std::clamp(p.x, 0.0, cfg.area_width), std::clamp(p.y, 0.0, cfg.area_height)};
}

/// Uniform point in the movement disk around `prev_xy`, clipped to the area.
inline Vec2 waypoint_rfs(Vec2 prev_xy, const ScenarioConfig& cfg, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double radius = cfg.max_step() * std::sqrt(unit(rng));
  const double angle = 2.0 * std::numbers::pi * unit(rng);
  return clip_to_area(prev_xy + Vec2{radius * std::cos(angle), radius * std::sin(angle)}, cfg);
}

namespace detail {

inline std::optional<std::size_t> fullest_node(std::span<const SensorNode> nodes) {
  std::optional<std::size_t> best;
  for (const auto& node : nodes)
    if (!best || node.queue_bits > nodes[*best].queue_bits) best = node.id;
  return best;
}

}  // namespace detail

/// Moves at full speed toward the fullest node anywhere in the field; stops
/// on it if it is closer than one slot's flight.
inline Vec2 fly_toward_fullest(const WorldState& world, const ScenarioConfig& cfg) {
  const auto target = detail::fullest_node(world.nodes);
  if (!target) return world.uav_xy;
  return step_toward(world.uav_xy, world.nodes[*target].position, cfg.max_step());
}

/// Greedy baseline: hover over the fullest node reachable this slot.
inline Vec2 waypoint_gfs(const WorldState& world, const ScenarioConfig& cfg) {
  std::optional<std::size_t> best;
  for (const auto& node : world.nodes) {
    if (distance(node.position, world.uav_xy) > cfg.max_step()) continue;
    if (!best || node.queue_bits > world.nodes[*best].queue_bits) best = node.id;
  }
  if (best) return world.nodes[*best].position;
  return fly_toward_fullest(world, cfg);
}

/// Summed expected rate times tau_c at a 3-D position.
inline double expected_throughput_at(std::span<const SensorNode> served, Vec3 uav, const ScenarioConfig& cfg) {
  double total = 0.0;
  for (const auto& node : served) total += expected_link_rate(node.position, uav, cfg);
  return total * cfg.comm_tau_c;
}

/// Grid search for the 3-D waypoint under the probabilistic LoS model.
///
/// Horizontal spacing d_c / 10 over the movement disk, 21 altitude levels
/// spanning [z_min, z_max]; maximizes the expected rate sum. Ties keep the
/// first point in (x, y, z) scan order.
inline Vec3 solve_p2_grid(std::span<const SensorNode> served, Vec3 prev, const ScenarioConfig& cfg) {
  if (served.empty()) throw std::invalid_argument("solve_p2_grid: no served nodes");

  const LosParams& los = cfg.los_params;
  const double reach = cfg.max_step();
  const double h_step = cfg.comm_radius_dc > 0.0 ? cfg.comm_radius_dc / 10.0 : reach / 100.0;
  const auto h_count = static_cast<std::int64_t>(std::floor(reach / h_step));
  constexpr int kAltitudeSteps = 20;
  const double z_step = (los.z_max - los.z_min) / kAltitudeSteps;
  const int z_count = z_step > 0.0 ? kAltitudeSteps : 0;

  Vec3 best{prev.xy, los.z_min};
  double best_value = -1.0;
  for (std::int64_t i = -h_count; i <= h_count; ++i) {
    for (std::int64_t j = -h_count; j <= h_count; ++j) {
      const Vec2 xy = prev.xy + Vec2{static_cast<double>(i) * h_step, static_cast<double>(j) * h_step};
      if (distance(xy, prev.xy) > reach) continue;
      for (int k = 0; k <= z_count; ++k) {
        const Vec3 probe{xy, los.z_min + k * z_step};
        const double value = expected_throughput_at(served, probe, cfg);
        if (value > best_value) {
          best_value = value;
          best = probe;
        }
      }
    }
  }
  return best;
}

}  // namespace uavdc
