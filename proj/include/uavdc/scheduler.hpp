#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "uavdc/geometry.hpp"
#include "uavdc/model.hpp"

namespace uavdc {

struct ScheduleDiagnostics {
  std::size_t num_candidates_examined{0};
  std::optional<std::size_t> seed_node_id;
  std::optional<std::size_t> partner_id;
};

/// Nodes picked for one slot. `served_ids` is ascending and never longer
/// than the number of blocks.
struct Schedule {
  std::int64_t slot{0};
  std::vector<std::size_t> served_ids;
  std::int64_t score_bits{0};
  std::optional<CandidateCircle> chosen_circle;
  ScheduleDiagnostics diagnostics;

  bool empty() const { return served_ids.empty(); }
};

namespace detail {

/// Sorts ids fullest-first (least free space), ties by ascending id.
inline void sort_by_free_space(std::vector<std::size_t>& ids, const WorldState& world) {
  std::sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) {
    const auto qa = world.nodes[a].queue_bits;
    const auto qb = world.nodes[b].queue_bits;
    return qa != qb ? qa > qb : a < b;
  });
}

inline Schedule empty_schedule(const WorldState& world, const ScenarioConfig& cfg) {
  Schedule s;
  s.slot = world.slot + 1;
  s.score_bits = cfg.num_blocks_n * cfg.storage_capacity_b;
  return s;
}

/// The `n` fullest nodes around `waypoint`: the shared node-selection rule
/// of both baselines.
inline Schedule fullest_around(const WorldState& world, Vec2 waypoint, const ScenarioConfig& cfg);

}  // namespace detail

/// Seeds for the pair search: nodes within V_max tau - d_c of the UAV, or
/// within V_max tau when the UAV moves less than d_c per slot.
inline std::vector<std::size_t> reachable_seed_set(const WorldState& world, const ScenarioConfig& cfg) {
  const double reach = cfg.max_step();
  const double radius = reach > cfg.comm_radius_dc ? reach - cfg.comm_radius_dc : reach;
  return nodes_in_disk(world.uav_xy, radius, world.nodes);
}

/// Fullest node other than the seed that lies within 2 d_c of it.
inline std::optional<std::size_t> find_partner(std::size_t seed_id, const WorldState& world,
                                               const ScenarioConfig& cfg) {
  const Vec2 seed = world.nodes.at(seed_id).position;
  std::optional<std::size_t> best;
  for (const auto& node : world.nodes) {
    if (node.id == seed_id || distance(node.position, seed) > 2.0 * cfg.comm_radius_dc) continue;
    if (!best || node.queue_bits > world.nodes[*best].queue_bits) best = node.id;
  }
  return best;
}

/// Sum of free space over `ids`. In padded mode every unused block adds a
/// full buffer B, so smaller sets never look better than fuller, larger ones.
inline std::int64_t set_score(std::span<const std::size_t> ids, const WorldState& world,
                              const ScenarioConfig& cfg) {
  const std::int64_t capacity = cfg.storage_capacity_b;
  std::int64_t score = 0;
  for (auto id : ids) score += world.nodes.at(id).available_bits(capacity);
  if (cfg.score_mode == ScoreMode::padded) {
    const auto missing = cfg.num_blocks_n - static_cast<std::int64_t>(ids.size());
    score += std::max<std::int64_t>(0, missing) * capacity;
  }
  return score;
}

/// Pair-anchored candidate search for the slot's node set.
///
/// Every reachable seed is paired with its fullest neighbour within 2 d_c;
/// up to five radius-d_c circles through the pair are built, each circle is
/// filled with its n - 2 fullest remaining members, and the lowest-scoring
/// set over all (seed, circle) pairs wins. Ties keep the earlier seed and
/// circle. Returns an empty schedule when no seed has a partner.
inline Schedule schedule_uts(const WorldState& world, const ScenarioConfig& cfg) {
  Schedule best = detail::empty_schedule(world, cfg);
  const auto blocks = static_cast<std::size_t>(cfg.num_blocks_n);
  const double d_c = cfg.comm_radius_dc;
  bool found = false;

  for (auto seed : reachable_seed_set(world, cfg)) {
    const auto partner = find_partner(seed, world, cfg);
    if (!partner) continue;

    const Vec2 li = world.nodes[seed].position;
    const Vec2 lk = world.nodes[*partner].position;
    if (li == lk) continue;  // stacked nodes: no direction to build circles from

    for (const auto& candidate : candidate_centers(li, lk, d_c)) {
      // In the slow-UAV regime a circle around a seed can sit beyond one
      // slot's flight; such circles are not reachable this slot.
      if (distance(candidate.center, world.uav_xy) > cfg.max_step() + kMergeTolerance) continue;
      ++best.diagnostics.num_candidates_examined;

      auto members = nodes_in_disk(candidate.center, d_c, world.nodes);
      std::vector<std::size_t> others;
      others.reserve(members.size());
      for (auto id : members)
        if (id != seed && id != *partner) others.push_back(id);
      detail::sort_by_free_space(others, world);

      std::vector<std::size_t> chosen{seed, *partner};
      if (chosen.size() > blocks) detail::sort_by_free_space(chosen, world);
      chosen.resize(std::min(chosen.size(), blocks));
      for (auto id : others) {
        if (chosen.size() >= blocks) break;
        chosen.push_back(id);
      }
      if (cfg.score_mode == ScoreMode::literal && chosen.size() < blocks) continue;

      const auto score = set_score(chosen, world, cfg);
      if (found && score >= best.score_bits) continue;

      found = true;
      std::sort(chosen.begin(), chosen.end());
      best.served_ids = std::move(chosen);
      best.score_bits = score;
      best.chosen_circle = CandidateCircle{candidate.center, d_c, std::move(members), candidate.source};
      best.diagnostics.seed_node_id = seed;
      best.diagnostics.partner_id = *partner;
    }
  }
  return best;
}

inline Schedule detail::fullest_around(const WorldState& world, Vec2 waypoint, const ScenarioConfig& cfg) {
  Schedule s = empty_schedule(world, cfg);
  auto ids = nodes_in_disk(waypoint, cfg.comm_radius_dc, world.nodes);
  sort_by_free_space(ids, world);
  ids.resize(std::min(ids.size(), static_cast<std::size_t>(cfg.num_blocks_n)));
  std::sort(ids.begin(), ids.end());
  s.score_bits = set_score(ids, world, cfg);
  s.served_ids = std::move(ids);
  return s;
}

/// Random-flight baseline: the n fullest nodes within d_c of the random waypoint.
inline Schedule schedule_rfs(const WorldState& world, Vec2 waypoint, const ScenarioConfig& cfg) {
  return detail::fullest_around(world, waypoint, cfg);
}

/// Greedy-flight baseline: same rule as the random baseline, around the greedy waypoint.
inline Schedule schedule_gfs(const WorldState& world, Vec2 waypoint, const ScenarioConfig& cfg) {
  return detail::fullest_around(world, waypoint, cfg);
}

/// Test oracle: tries every grid point within one slot's flight as a circle
/// center and keeps the best n-fullest set. Quadratic in reach / grid_step.
inline Schedule brute_force_schedule(const WorldState& world, const ScenarioConfig& cfg, double grid_step) {
  if (!(grid_step > 0.0)) throw std::invalid_argument("brute_force_schedule: grid_step must be > 0");

  Schedule best = detail::empty_schedule(world, cfg);
  const double reach = cfg.max_step();
  const auto steps = static_cast<std::int64_t>(std::floor(reach / grid_step));
  const auto blocks = static_cast<std::size_t>(cfg.num_blocks_n);
  bool found = false;

  for (std::int64_t i = -steps; i <= steps; ++i) {
    for (std::int64_t j = -steps; j <= steps; ++j) {
      const Vec2 center = world.uav_xy + Vec2{static_cast<double>(i) * grid_step, static_cast<double>(j) * grid_step};
      if (distance(center, world.uav_xy) > reach) continue;
      ++best.diagnostics.num_candidates_examined;

      auto members = nodes_in_disk(center, cfg.comm_radius_dc, world.nodes);
      if (members.empty()) continue;
      auto chosen = members;
      detail::sort_by_free_space(chosen, world);
      chosen.resize(std::min(chosen.size(), blocks));
      if (cfg.score_mode == ScoreMode::literal && chosen.size() < blocks) continue;

      const auto score = set_score(chosen, world, cfg);
      if (found && score >= best.score_bits) continue;

      found = true;
      std::sort(chosen.begin(), chosen.end());
      best.served_ids = std::move(chosen);
      best.score_bits = score;
      best.chosen_circle = CandidateCircle{center, cfg.comm_radius_dc, std::move(members), CircleSource::c5};
    }
  }
  return best;
}

}  // namespace uavdc
