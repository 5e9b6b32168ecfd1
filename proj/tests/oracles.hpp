#pragma once

// Independent reference computations for tests. Nothing here calls the
// routine it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "uavdc/model.hpp"

namespace uavdc::oracle {

/// Closed-disk membership by plain scan, in node order.
inline std::vector<std::size_t> scan_disk(const std::vector<SensorNode>& nodes, Vec2 center, double radius) {
  std::vector<std::size_t> ids;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double dx = nodes[i].position.x - center.x;
    const double dy = nodes[i].position.y - center.y;
    if (std::sqrt(dx * dx + dy * dy) <= radius) ids.push_back(nodes[i].id);
  }
  return ids;
}

/// Padded free-space score written out from its definition.
inline std::int64_t padded_score(const std::vector<std::size_t>& ids, const std::vector<SensorNode>& nodes,
                                 std::int64_t capacity, std::int64_t blocks) {
  std::int64_t s = (blocks - static_cast<std::int64_t>(ids.size())) * capacity;
  for (auto id : ids) s += capacity - nodes[id].queue_bits;
  return s;
}

/// Minimum padded score over every subset of `pool` with at most `blocks`
/// members (exhaustive enumeration; pool must be small).
inline std::int64_t best_subset_score(const std::vector<std::size_t>& pool, const std::vector<SensorNode>& nodes,
                                      std::int64_t capacity, std::int64_t blocks,
                                      std::vector<std::size_t>* best_ids = nullptr) {
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  const std::size_t n = pool.size();
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    std::vector<std::size_t> ids;
    for (std::size_t b = 0; b < n; ++b)
      if (mask & (1u << b)) ids.push_back(pool[b]);
    if (static_cast<std::int64_t>(ids.size()) > blocks) continue;
    const auto s = padded_score(ids, nodes, capacity, blocks);
    if (s < best) {
      best = s;
      if (best_ids) *best_ids = ids;
    }
  }
  return best;
}

/// Fixed-altitude Shannon rate written directly from the link budget.
inline double rate(double gain, double d2, const ScenarioConfig& cfg) {
  const double snr = gain * cfg.tx_power_p / (cfg.noise_power * (cfg.altitude_h * cfg.altitude_h + d2));
  return cfg.bandwidth_w * std::log(1.0 + snr) / std::numbers::ln2;
}

/// Central finite difference of the rate with respect to squared distance.
inline double rate_slope_fd(double gain, double d2, const ScenarioConfig& cfg, double step = 1e-3) {
  return (rate(gain, d2 + step, cfg) - rate(gain, d2 - step, cfg)) / (2.0 * step);
}

/// Summed rate times tau_c at `uav` for the given nodes.
inline double throughput(const std::vector<SensorNode>& served, Vec2 uav, const ScenarioConfig& cfg) {
  double total = 0.0;
  for (const auto& n : served) {
    const double dx = n.position.x - uav.x, dy = n.position.y - uav.y;
    total += rate(n.gain_alpha, dx * dx + dy * dy, cfg);
  }
  return total * cfg.comm_tau_c;
}

/// Uniform point in the closed disk (rejection sampling from the square).
template <typename Gen>
Vec2 uniform_in_disk(Vec2 center, double radius, Gen& gen) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    const double x = u(gen), y = u(gen);
    if (x * x + y * y <= 1.0) return {center.x + radius * x, center.y + radius * y};
  }
}

/// Best value of `f` over `count` uniform probes in the disk.
template <typename Gen>
double best_probe(const std::function<double(Vec2)>& f, Vec2 center, double radius, int count, Gen& gen) {
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < count; ++i) best = std::max(best, f(uniform_in_disk(center, radius, gen)));
  return best;
}

/// Total loss of a node that is never served: q0 grows by s per slot and
/// everything above B is discarded, so the run loses max(0, q0 + s T - B).
inline std::int64_t no_service_loss(std::int64_t q0, std::int64_t s, std::int64_t slots, std::int64_t capacity) {
  return std::max<std::int64_t>(0, q0 + s * slots - capacity);
}

}  // namespace uavdc::oracle
