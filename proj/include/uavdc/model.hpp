#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace uavdc {

struct Vec2 {
  double x{0.0};
  double y{0.0};

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
  friend constexpr bool operator==(Vec2 a, Vec2 b) = default;

  constexpr double squared_norm() const { return x * x + y * y; }
  double norm() const { return std::hypot(x, y); }
};

struct Vec3 {
  Vec2 xy;
  double z{0.0};
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }
inline double squared_distance(Vec2 a, Vec2 b) { return (a - b).squared_norm(); }

/// Point at distance at most `radius` from `center`: `p` itself when inside,
/// otherwise the radial projection onto the boundary circle.
inline Vec2 project_onto_disk(Vec2 p, Vec2 center, double radius) {
  const Vec2 offset = p - center;
  const double len = offset.norm();
  if (len <= radius) return p;
  if (radius <= 0.0) return center;
  return center + (radius / len) * offset;
}

/// Moves from `from` toward `to`, covering at most `max_step` meters.
inline Vec2 step_toward(Vec2 from, Vec2 to, double max_step) {
  return project_onto_disk(to, from, max_step);
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

enum class ChannelKind { deterministic_los, probabilistic_los };

/// How a candidate node set is scored when the scheduler compares sets.
enum class ScoreMode {
  padded,   ///< sum of free space plus B for every unused block
  literal,  ///< plain sum of free space, only full-cardinality sets compete
};

/// How per-slot overflow is charged.
enum class LossMode {
  reconciled,  ///< sample, transmit, then discard whatever exceeds B
  literal,     ///< D = max(0, B(t-1) + s - B), ignoring the slot's throughput
};

/// Feasible set used when the joint strategy places its waypoint.
enum class WaypointMode {
  unconstrained,  ///< movement disk only; out-of-range served nodes are dropped afterwards
  covering,       ///< movement disk intersected with every served node's d_c disk
};

/// Normalization of the loss-rate metric.
enum class EtaMode {
  normalized,  ///< divide by |nodes| * s * T, always in [0, 1]
  literal,     ///< divide by s * T only
};

/// Parameters of the elevation-angle LoS model. Defaults are a common urban
/// parameterization; none of them are fixed by the collection strategy itself.
struct LosParams {
  double a{9.61};
  double b{0.16};
  double beta0{1e-5};
  double mu{0.2};
  double alpha_l{2.0};
  double alpha_n{3.0};
  double gamma{1.0};  // SNR gap, 0 dB
  double z_min{20.0};
  double z_max{100.0};
};

struct ScenarioConfig {
  double area_width{100.0};
  double area_height{100.0};
  std::int64_t num_nodes{200};
  std::int64_t sampling_rate_s{120};  // bits per slot
  std::int64_t storage_capacity_b{30000};
  double initial_queue_mean{10000.0};
  double altitude_h{20.0};
  double v_max{30.0};
  double slot_tau{1.0};
  double comm_tau_c{0.1};
  std::int64_t max_slots{600};
  double comm_radius_dc{10.0};
  std::int64_t num_blocks_n{4};
  double bandwidth_w{5e6};
  double tx_power_p{0.05};
  double noise_power{1e-13};  // -100 dBm
  double gain_db_low{-55.0};
  double gain_db_high{-50.0};
  ChannelKind channel_kind{ChannelKind::deterministic_los};
  LosParams los_params{};
  std::uint64_t rng_seed{1};

  bool static_gains{false};
  std::optional<Vec2> uav_start{};
  ScoreMode score_mode{ScoreMode::padded};
  LossMode loss_mode{LossMode::reconciled};
  EtaMode eta_mode{EtaMode::normalized};
  WaypointMode waypoint_mode{WaypointMode::unconstrained};

  double max_step() const { return v_max * slot_tau; }
  Vec2 area_center() const { return {0.5 * area_width, 0.5 * area_height}; }
};

/// Parameter set of the reference scenario: 200 nodes in a 100 x 100 m field,
/// W = 5 MHz, noise -100 dBm, p = 0.05 W, gains in [-55, -50] dB, d_c = 10 m,
/// n = 4, H = 20 m, V_max = 30 m/s, tau = 1 s, tau_c = 0.1 s, T_e = 600 s.
inline ScenarioConfig reference_config() { return ScenarioConfig{}; }

struct ConfigViolation {
  std::string field;
  std::string value;
  std::string rule;
};

class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(std::vector<ConfigViolation> violations)
      : std::invalid_argument(describe(violations)), violations_(std::move(violations)) {}

  const std::vector<ConfigViolation>& violations() const { return violations_; }

  static std::string describe(const std::vector<ConfigViolation>& violations) {
    std::ostringstream os;
    os << "invalid scenario config (" << violations.size() << " violation"
       << (violations.size() == 1 ? "" : "s") << ")";
    for (const auto& v : violations) os << "\n  " << v.field << " = " << v.value << ": " << v.rule;
    return os.str();
  }

 private:
  std::vector<ConfigViolation> violations_;
};

namespace detail {

template <typename T>
std::string to_text(T v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace detail

/// Every violated invariant of `cfg`, in field order. Empty means valid.
inline std::vector<ConfigViolation> check_config(const ScenarioConfig& cfg) {
  std::vector<ConfigViolation> out;
  auto require = [&out](bool ok, const char* field, auto value, const char* rule) {
    if (!ok || !std::isfinite(static_cast<double>(value)))
      out.push_back({field, detail::to_text(value), rule});
  };

  require(cfg.area_width > 0, "area_width", cfg.area_width, "must be > 0");
  require(cfg.area_height > 0, "area_height", cfg.area_height, "must be > 0");
  require(cfg.num_nodes > 0, "num_nodes", cfg.num_nodes, "must be > 0");
  // s = 0 and d_c = 0 are degenerate but well defined (no sampling / no service).
  require(cfg.sampling_rate_s >= 0, "sampling_rate_s", cfg.sampling_rate_s, "must be >= 0");
  require(cfg.storage_capacity_b > 0, "storage_capacity_b", cfg.storage_capacity_b, "must be > 0");
  require(cfg.initial_queue_mean > 0, "initial_queue_mean", cfg.initial_queue_mean, "must be > 0");
  require(cfg.altitude_h > 0, "altitude_h", cfg.altitude_h, "must be > 0");
  require(cfg.v_max > 0, "v_max", cfg.v_max, "must be > 0");
  require(cfg.slot_tau > 0, "slot_tau", cfg.slot_tau, "must be > 0");
  require(cfg.comm_tau_c > 0, "comm_tau_c", cfg.comm_tau_c, "must be > 0");
  require(cfg.comm_tau_c < cfg.slot_tau, "comm_tau_c", cfg.comm_tau_c, "must be < slot_tau");
  require(cfg.max_slots > 0, "max_slots", cfg.max_slots, "must be > 0");
  require(cfg.comm_radius_dc >= 0, "comm_radius_dc", cfg.comm_radius_dc, "must be >= 0");
  require(cfg.num_blocks_n >= 1, "num_blocks_n", cfg.num_blocks_n, "must be >= 1");
  require(cfg.bandwidth_w > 0, "bandwidth_w", cfg.bandwidth_w, "must be > 0");
  require(cfg.tx_power_p > 0, "tx_power_p", cfg.tx_power_p, "must be > 0");
  require(cfg.noise_power > 0, "noise_power", cfg.noise_power, "must be > 0");
  require(cfg.gain_db_low <= cfg.gain_db_high, "gain_db_low", cfg.gain_db_low,
          "must be <= gain_db_high");
  require(true, "gain_db_high", cfg.gain_db_high, "must be finite");

  if (cfg.uav_start) {
    const Vec2 p = *cfg.uav_start;
    require(p.x >= 0 && p.x <= cfg.area_width, "uav_start_x", p.x, "must lie inside the area");
    require(p.y >= 0 && p.y <= cfg.area_height, "uav_start_y", p.y, "must lie inside the area");
  }

  if (cfg.channel_kind == ChannelKind::probabilistic_los) {
    const LosParams& los = cfg.los_params;
    require(los.a > 0, "los_a", los.a, "must be > 0");
    require(los.b >= 0, "los_b", los.b, "must be >= 0");
    require(los.beta0 > 0, "los_beta0", los.beta0, "must be > 0");
    require(los.mu > 0 && los.mu <= 1, "los_mu", los.mu, "must be in (0, 1]");
    require(los.alpha_l > 0, "los_alpha_l", los.alpha_l, "must be > 0");
    require(los.alpha_n >= los.alpha_l, "los_alpha_n", los.alpha_n, "must be >= los_alpha_l");
    require(los.gamma > 0, "los_gamma", los.gamma, "must be > 0");
    require(los.z_min > 0, "los_z_min", los.z_min, "must be > 0");
    require(los.z_max >= los.z_min, "los_z_max", los.z_max, "must be >= los_z_min");
  }
  return out;
}

/// Returns `cfg` unchanged, or throws ConfigError listing every violation.
inline const ScenarioConfig& validate_config(const ScenarioConfig& cfg) {
  if (auto violations = check_config(cfg); !violations.empty()) throw ConfigError(std::move(violations));
  return cfg;
}

struct SensorNode {
  std::size_t id{0};
  Vec2 position;
  double gain_alpha{0.0};  // linear reference gain at 1 m
  std::int64_t queue_bits{0};
  std::int64_t lost_bits_total{0};

  std::int64_t available_bits(std::int64_t capacity) const { return capacity - queue_bits; }
};

using Rng = std::mt19937_64;

struct WorldState {
  std::vector<SensorNode> nodes;  // nodes[i].id == i
  Vec2 uav_xy;
  double uav_z{0.0};
  std::int64_t slot{0};
  Rng rng;
};

/// Draws a fresh reference gain, uniform in dB and returned as a linear ratio.
inline double draw_gain(const ScenarioConfig& cfg, Rng& rng) {
  std::uniform_real_distribution<double> db(cfg.gain_db_low, cfg.gain_db_high);
  return db_to_linear(cfg.gain_db_low == cfg.gain_db_high ? cfg.gain_db_low : db(rng));
}

/// Random deployment: uniform positions, Poisson initial queues clamped to
/// [0, B], uniform-dB gains. The UAV starts at the area center unless
/// `uav_start` overrides it.
inline WorldState init_world(const ScenarioConfig& cfg) {
  validate_config(cfg);

  WorldState world;
  world.rng.seed(cfg.rng_seed);
  std::uniform_real_distribution<double> ux(0.0, cfg.area_width);
  std::uniform_real_distribution<double> uy(0.0, cfg.area_height);
  std::poisson_distribution<std::int64_t> initial_queue(cfg.initial_queue_mean);

  world.nodes.reserve(static_cast<std::size_t>(cfg.num_nodes));
  for (std::int64_t i = 0; i < cfg.num_nodes; ++i) {
    SensorNode node;
    node.id = static_cast<std::size_t>(i);
    node.position.x = ux(world.rng);
    node.position.y = uy(world.rng);
    node.queue_bits = std::clamp<std::int64_t>(initial_queue(world.rng), 0, cfg.storage_capacity_b);
    node.gain_alpha = draw_gain(cfg, world.rng);
    world.nodes.push_back(node);
  }

  world.uav_xy = cfg.uav_start.value_or(cfg.area_center());
  world.uav_z = cfg.channel_kind == ChannelKind::probabilistic_los ? cfg.los_params.z_min
                                                                   : cfg.altitude_h;
  world.slot = 0;
  return world;
}

}  // namespace uavdc
