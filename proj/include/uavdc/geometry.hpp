#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "uavdc/model.hpp"

namespace uavdc {

/// Coincidence tolerance for candidate centers, in meters.
inline constexpr double kMergeTolerance = 1e-9;

/// Which of the five pair-anchored placements produced a candidate circle.
///   c1, c2  both nodes on the boundary, centers on the perpendicular bisector
///   c3      boundary through k, center on the segment toward i
///   c4      boundary through i, center on the segment toward k
///   c5      centered on the midpoint
enum class CircleSource { c1, c2, c3, c4, c5 };

struct CandidateCenter {
  Vec2 center;
  CircleSource source;
};

struct CandidateCircle {
  Vec2 center;
  double radius{0.0};
  std::vector<std::size_t> member_ids;
  CircleSource source{CircleSource::c5};
};

/// Centers of the radius-`d_c` disks built from the pair (li, lk). Coincident
/// centers are merged, keeping the first in c1..c5 order, so a pair exactly
/// 2 d_c apart yields a single center at the midpoint.
inline std::vector<CandidateCenter> candidate_centers(Vec2 li, Vec2 lk, double d_c) {
  const Vec2 delta = li - lk;
  const double d_ik = delta.norm();
  if (d_ik == 0.0) throw std::invalid_argument("candidate_centers: nodes coincide");
  if (d_ik > 2.0 * d_c) throw std::domain_error("candidate_centers: pair farther apart than 2 d_c");

  const Vec2 mid = 0.5 * (li + lk);
  const Vec2 unit = (1.0 / d_ik) * delta;  // k -> i
  const Vec2 normal{-unit.y, unit.x};
  const double half_chord = std::sqrt(std::max(0.0, d_c * d_c - 0.25 * d_ik * d_ik));

  const CandidateCenter raw[] = {
      {mid + half_chord * normal, CircleSource::c1},
      {mid - half_chord * normal, CircleSource::c2},
      {lk + d_c * unit, CircleSource::c3},
      {li - d_c * unit, CircleSource::c4},
      {mid, CircleSource::c5},
  };

  std::vector<CandidateCenter> out;
  out.reserve(5);
  for (const auto& c : raw) {
    bool duplicate = false;
    for (const auto& kept : out) duplicate |= distance(kept.center, c.center) <= kMergeTolerance;
    if (!duplicate) out.push_back(c);
  }
  return out;
}

/// Upper bound on min(d_ji, d_jk) for any node j that can share a
/// radius-d_c disk with both i and k.
inline double prop1_bound(double d_ik, double d_c) {
  if (d_ik < 0.0 || d_ik > 2.0 * d_c) throw std::domain_error("prop1_bound: d_ik outside [0, 2 d_c]");
  const double quarter = 0.25 * d_ik * d_ik;
  const double reach = d_c + std::sqrt(std::max(0.0, d_c * d_c - quarter));
  return std::sqrt(quarter + reach * reach);
}

/// Ids of the nodes inside the closed disk, ascending.
inline std::vector<std::size_t> nodes_in_disk(Vec2 center, double radius, std::span<const SensorNode> nodes) {
  std::vector<std::size_t> ids;
  for (const auto& node : nodes)
    if (distance(node.position, center) <= radius) ids.push_back(node.id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace uavdc
