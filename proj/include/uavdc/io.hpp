#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "uavdc/engine.hpp"
#include "uavdc/model.hpp"

namespace uavdc::io {

/// Syntax problem in a config file (unknown key, bad number, missing '=').
class ConfigParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigParseError("'" + key + "': expected a number, got '" + text + "'");
  }
}

inline std::int64_t parse_int(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigParseError("'" + key + "': expected an integer, got '" + text + "'");
  }
}

inline bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigParseError("'" + key + "': expected true/false, got '" + text + "'");
}

template <typename Enum>
Enum parse_choice(const std::string& key, const std::string& text,
                  std::initializer_list<std::pair<std::string_view, Enum>> choices) {
  for (const auto& [name, value] : choices)
    if (text == name) return value;
  std::string expected;
  for (const auto& [name, value] : choices) expected += (expected.empty() ? "" : ", ") + std::string(name);
  throw ConfigParseError("'" + key + "': expected one of {" + expected + "}, got '" + text + "'");
}

}  // namespace detail

inline std::string_view to_string(ChannelKind k) {
  return k == ChannelKind::deterministic_los ? "deterministic-los" : "probabilistic-los";
}
inline std::string_view to_string(ScoreMode m) { return m == ScoreMode::padded ? "padded" : "literal"; }
inline std::string_view to_string(LossMode m) { return m == LossMode::reconciled ? "reconciled" : "literal"; }
inline std::string_view to_string(EtaMode m) { return m == EtaMode::normalized ? "normalized" : "literal"; }
inline std::string_view to_string(WaypointMode m) {
  return m == WaypointMode::unconstrained ? "unconstrained" : "covering";
}

inline ChannelKind parse_channel_kind(const std::string& text) {
  return detail::parse_choice<ChannelKind>(
      "channel_kind", text,
      {{"deterministic-los", ChannelKind::deterministic_los}, {"probabilistic-los", ChannelKind::probabilistic_los}});
}

/// Applies one `key = value` assignment to `cfg`.
inline void apply_setting(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
  using detail::parse_bool;
  using detail::parse_double;
  using detail::parse_int;
  LosParams& los = cfg.los_params;

  static const std::map<std::string, std::function<void(ScenarioConfig&, LosParams&, const std::string&)>> setters = {
      {"area_width", [](auto& c, auto&, auto& v) { c.area_width = parse_double("area_width", v); }},
      {"area_height", [](auto& c, auto&, auto& v) { c.area_height = parse_double("area_height", v); }},
      {"num_nodes", [](auto& c, auto&, auto& v) { c.num_nodes = parse_int("num_nodes", v); }},
      {"sampling_rate_s", [](auto& c, auto&, auto& v) { c.sampling_rate_s = parse_int("sampling_rate_s", v); }},
      {"storage_capacity_b",
       [](auto& c, auto&, auto& v) { c.storage_capacity_b = parse_int("storage_capacity_b", v); }},
      {"initial_queue_mean",
       [](auto& c, auto&, auto& v) { c.initial_queue_mean = parse_double("initial_queue_mean", v); }},
      {"altitude_h", [](auto& c, auto&, auto& v) { c.altitude_h = parse_double("altitude_h", v); }},
      {"v_max", [](auto& c, auto&, auto& v) { c.v_max = parse_double("v_max", v); }},
      {"slot_tau", [](auto& c, auto&, auto& v) { c.slot_tau = parse_double("slot_tau", v); }},
      {"comm_tau_c", [](auto& c, auto&, auto& v) { c.comm_tau_c = parse_double("comm_tau_c", v); }},
      {"max_slots", [](auto& c, auto&, auto& v) { c.max_slots = parse_int("max_slots", v); }},
      {"comm_radius_dc", [](auto& c, auto&, auto& v) { c.comm_radius_dc = parse_double("comm_radius_dc", v); }},
      {"num_blocks_n", [](auto& c, auto&, auto& v) { c.num_blocks_n = parse_int("num_blocks_n", v); }},
      {"bandwidth_w", [](auto& c, auto&, auto& v) { c.bandwidth_w = parse_double("bandwidth_w", v); }},
      {"tx_power_p", [](auto& c, auto&, auto& v) { c.tx_power_p = parse_double("tx_power_p", v); }},
      {"noise_power", [](auto& c, auto&, auto& v) { c.noise_power = parse_double("noise_power", v); }},
      {"gain_db_low", [](auto& c, auto&, auto& v) { c.gain_db_low = parse_double("gain_db_low", v); }},
      {"gain_db_high", [](auto& c, auto&, auto& v) { c.gain_db_high = parse_double("gain_db_high", v); }},
      {"channel_kind", [](auto& c, auto&, auto& v) { c.channel_kind = parse_channel_kind(v); }},
      {"rng_seed",
       [](auto& c, auto&, auto& v) { c.rng_seed = static_cast<std::uint64_t>(parse_int("rng_seed", v)); }},
      {"static_gains", [](auto& c, auto&, auto& v) { c.static_gains = parse_bool("static_gains", v); }},
      {"uav_start_x",
       [](auto& c, auto&, auto& v) {
         c.uav_start = Vec2{parse_double("uav_start_x", v), c.uav_start.value_or(c.area_center()).y};
       }},
      {"uav_start_y",
       [](auto& c, auto&, auto& v) {
         c.uav_start = Vec2{c.uav_start.value_or(c.area_center()).x, parse_double("uav_start_y", v)};
       }},
      {"score_mode",
       [](auto& c, auto&, auto& v) {
         c.score_mode = detail::parse_choice<ScoreMode>("score_mode", v,
                                                        {{"padded", ScoreMode::padded}, {"literal", ScoreMode::literal}});
       }},
      {"loss_mode",
       [](auto& c, auto&, auto& v) {
         c.loss_mode = detail::parse_choice<LossMode>(
             "loss_mode", v, {{"reconciled", LossMode::reconciled}, {"literal", LossMode::literal}});
       }},
      {"eta_mode",
       [](auto& c, auto&, auto& v) {
         c.eta_mode = detail::parse_choice<EtaMode>("eta_mode", v,
                                                    {{"normalized", EtaMode::normalized}, {"literal", EtaMode::literal}});
       }},
      {"waypoint_mode",
       [](auto& c, auto&, auto& v) {
         c.waypoint_mode = detail::parse_choice<WaypointMode>(
             "waypoint_mode", v,
             {{"unconstrained", WaypointMode::unconstrained}, {"covering", WaypointMode::covering}});
       }},
      {"los_a", [](auto&, auto& l, auto& v) { l.a = parse_double("los_a", v); }},
      {"los_b", [](auto&, auto& l, auto& v) { l.b = parse_double("los_b", v); }},
      {"los_beta0", [](auto&, auto& l, auto& v) { l.beta0 = parse_double("los_beta0", v); }},
      {"los_mu", [](auto&, auto& l, auto& v) { l.mu = parse_double("los_mu", v); }},
      {"los_alpha_l", [](auto&, auto& l, auto& v) { l.alpha_l = parse_double("los_alpha_l", v); }},
      {"los_alpha_n", [](auto&, auto& l, auto& v) { l.alpha_n = parse_double("los_alpha_n", v); }},
      {"los_gamma", [](auto&, auto& l, auto& v) { l.gamma = parse_double("los_gamma", v); }},
      {"los_z_min", [](auto&, auto& l, auto& v) { l.z_min = parse_double("los_z_min", v); }},
      {"los_z_max", [](auto&, auto& l, auto& v) { l.z_max = parse_double("los_z_max", v); }},
  };

  const auto it = setters.find(key);
  if (it == setters.end()) throw ConfigParseError("unknown key '" + key + "'");
  it->second(cfg, los, value);
}

/// Parses the flat `key = value` format; `#` starts a comment. Keys not
/// mentioned keep the reference values.
inline ScenarioConfig parse_config(std::string_view text) {
  ScenarioConfig cfg = reference_config();
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string stripped = detail::trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigParseError("line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = detail::trim(std::string_view(stripped).substr(0, eq));
    const std::string value = detail::trim(std::string_view(stripped).substr(eq + 1));
    try {
      apply_setting(cfg, key, value);
    } catch (const ConfigParseError& e) {
      throw ConfigParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

inline ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

/// Every setting as `key = value` lines, full precision; parse_config
/// reproduces `cfg` exactly.
inline std::string format_config(const ScenarioConfig& cfg) {
  using detail::format_double;
  std::ostringstream os;
  auto line = [&os](std::string_view key, const std::string& value) { os << key << " = " << value << '\n'; };
  line("area_width", format_double(cfg.area_width));
  line("area_height", format_double(cfg.area_height));
  line("num_nodes", std::to_string(cfg.num_nodes));
  line("sampling_rate_s", std::to_string(cfg.sampling_rate_s));
  line("storage_capacity_b", std::to_string(cfg.storage_capacity_b));
  line("initial_queue_mean", format_double(cfg.initial_queue_mean));
  line("altitude_h", format_double(cfg.altitude_h));
  line("v_max", format_double(cfg.v_max));
  line("slot_tau", format_double(cfg.slot_tau));
  line("comm_tau_c", format_double(cfg.comm_tau_c));
  line("max_slots", std::to_string(cfg.max_slots));
  line("comm_radius_dc", format_double(cfg.comm_radius_dc));
  line("num_blocks_n", std::to_string(cfg.num_blocks_n));
  line("bandwidth_w", format_double(cfg.bandwidth_w));
  line("tx_power_p", format_double(cfg.tx_power_p));
  line("noise_power", format_double(cfg.noise_power));
  line("gain_db_low", format_double(cfg.gain_db_low));
  line("gain_db_high", format_double(cfg.gain_db_high));
  line("channel_kind", std::string(to_string(cfg.channel_kind)));
  line("rng_seed", std::to_string(static_cast<std::int64_t>(cfg.rng_seed)));
  line("static_gains", cfg.static_gains ? "true" : "false");
  if (cfg.uav_start) {
    line("uav_start_x", format_double(cfg.uav_start->x));
    line("uav_start_y", format_double(cfg.uav_start->y));
  }
  line("score_mode", std::string(to_string(cfg.score_mode)));
  line("loss_mode", std::string(to_string(cfg.loss_mode)));
  line("eta_mode", std::string(to_string(cfg.eta_mode)));
  line("waypoint_mode", std::string(to_string(cfg.waypoint_mode)));
  const LosParams& los = cfg.los_params;
  line("los_a", format_double(los.a));
  line("los_b", format_double(los.b));
  line("los_beta0", format_double(los.beta0));
  line("los_mu", format_double(los.mu));
  line("los_alpha_l", format_double(los.alpha_l));
  line("los_alpha_n", format_double(los.alpha_n));
  line("los_gamma", format_double(los.gamma));
  line("los_z_min", format_double(los.z_min));
  line("los_z_max", format_double(los.z_max));
  return os.str();
}

inline constexpr std::string_view kTraceHeader =
    "slot,strategy,waypoint_x,waypoint_y,served_count,slot_throughput_bits,slot_loss_bits,cumulative_eta";

/// One row per slot under kTraceHeader. Coordinates carry nine decimals,
/// bit counts are exact integers, the running loss rate is in %.15e.
inline void write_trace_csv(std::ostream& os, const SimulationTrace& trace) {
  os << kTraceHeader << '\n';
  std::int64_t cumulative_loss = 0;
  char buf[256];
  for (const auto& r : trace.slots) {
    cumulative_loss += r.slot_loss_bits;
    const double eta = loss_rate(cumulative_loss, r.slot, trace.config);
    std::snprintf(buf, sizeof buf, "%lld,%s,%.9f,%.9f,%zu,%lld,%lld,%.15e\n", static_cast<long long>(r.slot),
                  std::string(to_string(r.strategy)).c_str(), r.waypoint.x, r.waypoint.y, r.served_ids.size(),
                  static_cast<long long>(r.slot_throughput_bits), static_cast<long long>(r.slot_loss_bits), eta);
    os << buf;
  }
}

inline std::string trace_csv(const SimulationTrace& trace) {
  std::ostringstream os;
  write_trace_csv(os, trace);
  return os.str();
}

struct Stats {
  double mean{0.0};
  double stddev{0.0};  // sample standard deviation (n - 1)
};

inline Stats summarize(const std::vector<double>& xs) {
  Stats s;
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return s;
}

}  // namespace uavdc::io
