#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "uavdc/channel.hpp"
#include "uavdc/model.hpp"
#include "uavdc/scheduler.hpp"
#include "uavdc/trajectory.hpp"

namespace uavdc {

enum class Strategy { uts, rfs, gfs };

inline std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::uts: return "uts";
    case Strategy::rfs: return "rfs";
    case Strategy::gfs: return "gfs";
  }
  return "?";
}

inline Strategy parse_strategy(std::string_view name) {
  if (name == "uts") return Strategy::uts;
  if (name == "rfs") return Strategy::rfs;
  if (name == "gfs") return Strategy::gfs;
  throw std::invalid_argument("unknown strategy '" + std::string(name) + "' (expected uts, rfs or gfs)");
}

struct SlotRecord {
  std::int64_t slot{0};  // 1-based
  Strategy strategy{Strategy::uts};
  Vec2 waypoint;
  double altitude{0.0};
  std::vector<std::size_t> served_ids;     // after feasibility repair
  std::vector<std::size_t> dropped_ids;    // scheduled but out of range at the waypoint
  std::vector<std::int64_t> throughput_bits;  // per node
  std::vector<std::int64_t> loss_bits;        // per node
  std::vector<std::int64_t> queue_bits;       // per node, end of slot
  std::int64_t slot_throughput_bits{0};
  std::int64_t slot_loss_bits{0};
  bool fallback{false};  // UTS found no schedule and flew toward the fullest node
};

struct SimulationTrace {
  ScenarioConfig config;
  Strategy strategy{Strategy::uts};
  std::vector<std::int64_t> initial_queue_bits;
  std::vector<SlotRecord> slots;
  double eta{0.0};
  double mean_waypoint_throughput_bits{0.0};
  double wall_time_seconds{0.0};

  std::int64_t total_loss_bits() const {
    std::int64_t total = 0;
    for (const auto& r : slots) total += r.slot_loss_bits;
    return total;
  }
};

/// Data loss rate over a finished run. Normalized mode divides by
/// |nodes| s T; literal mode by s T only.
inline double loss_rate(std::int64_t total_loss_bits, std::int64_t slots, const ScenarioConfig& cfg) {
  if (cfg.sampling_rate_s <= 0 || slots <= 0) return 0.0;
  double denom = static_cast<double>(cfg.sampling_rate_s) * static_cast<double>(slots);
  if (cfg.eta_mode == EtaMode::normalized) denom *= static_cast<double>(cfg.num_nodes);
  return static_cast<double>(total_loss_bits) / denom;
}

inline double loss_rate(const SimulationTrace& trace, const ScenarioConfig& cfg) {
  return loss_rate(trace.total_loss_bits(), static_cast<std::int64_t>(trace.slots.size()), cfg);
}

namespace detail {

inline std::vector<SensorNode> gather(const WorldState& world, const std::vector<std::size_t>& ids) {
  std::vector<SensorNode> out;
  out.reserve(ids.size());
  for (auto id : ids) out.push_back(world.nodes[id]);
  return out;
}

struct Decision {
  std::vector<std::size_t> served_ids;
  Vec2 waypoint;
  double altitude{0.0};
  bool fallback{false};
};

inline Decision decide(WorldState& world, Strategy strategy, const ScenarioConfig& cfg) {
  Decision d;
  d.altitude = world.uav_z;
  const bool probabilistic = cfg.channel_kind == ChannelKind::probabilistic_los;

  switch (strategy) {
    case Strategy::uts: {
      Schedule schedule = schedule_uts(world, cfg);
      if (schedule.empty()) {
        d.waypoint = fly_toward_fullest(world, cfg);
        d.fallback = true;
        break;
      }
      const auto served = gather(world, schedule.served_ids);
      if (probabilistic) {
        const Vec3 q = solve_p2_grid(served, {world.uav_xy, world.uav_z}, cfg);
        d.waypoint = q.xy;
        d.altitude = q.z;
      } else if (cfg.waypoint_mode == WaypointMode::covering) {
        d.waypoint = solve_sp2_covering(served, world.uav_xy, cfg).waypoint;
      } else {
        d.waypoint = solve_sp2(served, world.uav_xy, cfg).waypoint;
      }
      d.served_ids = std::move(schedule.served_ids);
      break;
    }
    case Strategy::rfs:
      d.waypoint = waypoint_rfs(world.uav_xy, cfg, world.rng);
      d.served_ids = schedule_rfs(world, d.waypoint, cfg).served_ids;
      break;
    case Strategy::gfs:
      d.waypoint = waypoint_gfs(world, cfg);
      d.served_ids = schedule_gfs(world, d.waypoint, cfg).served_ids;
      break;
  }
  return d;
}

}  // namespace detail

/// Advances the world by one slot.
///
/// Order within a slot: refresh gains, let the strategy pick nodes and a
/// waypoint, fly, sample s bits at every node, drain the served nodes for
/// tau_c at the new waypoint, then discard whatever exceeds B.
inline SlotRecord advance_slot(WorldState& world, Strategy strategy, const ScenarioConfig& cfg) {
  if (world.slot >= cfg.max_slots) throw std::logic_error("advance_slot: flight time exhausted");

  if (!cfg.static_gains)
    for (auto& node : world.nodes) node.gain_alpha = draw_gain(cfg, world.rng);

  detail::Decision decision = detail::decide(world, strategy, cfg);
  if (distance(decision.waypoint, world.uav_xy) > cfg.max_step() + 1e-9)
    throw std::logic_error("advance_slot: waypoint violates the speed limit");
  world.uav_xy = decision.waypoint;
  world.uav_z = decision.altitude;

  const std::size_t count = world.nodes.size();
  SlotRecord rec;
  rec.slot = world.slot + 1;
  rec.strategy = strategy;
  rec.waypoint = world.uav_xy;
  rec.altitude = world.uav_z;
  rec.fallback = decision.fallback;
  rec.throughput_bits.assign(count, 0);
  rec.loss_bits.assign(count, 0);
  rec.queue_bits.assign(count, 0);

  for (auto id : decision.served_ids) {
    if (is_reliable(world.nodes[id], world.uav_xy, cfg))
      rec.served_ids.push_back(id);
    else
      rec.dropped_ids.push_back(id);
  }

  std::vector<std::int64_t> before(count);
  for (std::size_t i = 0; i < count; ++i) {
    before[i] = world.nodes[i].queue_bits;
    world.nodes[i].queue_bits += cfg.sampling_rate_s;
  }

  for (auto id : rec.served_ids) {
    SensorNode& node = world.nodes[id];
    double rate = 0.0;
    if (cfg.channel_kind == ChannelKind::probabilistic_los) {
      rate = prob_link_rate(node, Vec3{world.uav_xy, world.uav_z}, cfg, world.rng).rate_bps;
    } else {
      rate = link_rate(node, world.uav_xy, cfg);
    }
    const auto capacity_bits = static_cast<std::int64_t>(std::floor(rate * cfg.comm_tau_c));
    const std::int64_t thr = std::min(capacity_bits, node.queue_bits);
    node.queue_bits -= thr;
    rec.throughput_bits[id] = thr;
    rec.slot_throughput_bits += thr;
  }

  const std::int64_t capacity = cfg.storage_capacity_b;
  for (std::size_t i = 0; i < count; ++i) {
    SensorNode& node = world.nodes[i];
    std::int64_t loss = std::max<std::int64_t>(0, node.queue_bits - capacity);
    if (cfg.loss_mode == LossMode::literal)
      loss = std::max<std::int64_t>(0, before[i] + cfg.sampling_rate_s - capacity);
    node.queue_bits = std::min(node.queue_bits, capacity);
    node.lost_bits_total += loss;
    rec.loss_bits[i] = loss;
    rec.slot_loss_bits += loss;
    rec.queue_bits[i] = node.queue_bits;
  }

  ++world.slot;
  return rec;
}

/// Full flight: deploy with `seed`, then fly max_slots slots.
inline SimulationTrace run(ScenarioConfig cfg, Strategy strategy, std::uint64_t seed) {
  cfg.rng_seed = seed;
  const auto started = std::chrono::steady_clock::now();

  WorldState world = init_world(cfg);
  SimulationTrace trace;
  trace.config = cfg;
  trace.strategy = strategy;
  for (const auto& node : world.nodes) trace.initial_queue_bits.push_back(node.queue_bits);
  trace.slots.reserve(static_cast<std::size_t>(cfg.max_slots));

  double throughput_sum = 0.0;
  while (world.slot < cfg.max_slots) {
    trace.slots.push_back(advance_slot(world, strategy, cfg));
    throughput_sum += static_cast<double>(trace.slots.back().slot_throughput_bits);
  }

  trace.eta = loss_rate(trace, cfg);
  trace.mean_waypoint_throughput_bits = throughput_sum / static_cast<double>(trace.slots.size());
  trace.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return trace;
}

inline SimulationTrace run(const ScenarioConfig& cfg, Strategy strategy) { return run(cfg, strategy, cfg.rng_seed); }

}  // namespace uavdc
