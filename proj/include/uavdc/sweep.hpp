#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "uavdc/engine.hpp"
#include "uavdc/io.hpp"
#include "uavdc/model.hpp"

namespace uavdc {

enum class SweepKind { area, sampling_rate, repeat };

inline std::string_view to_string(SweepKind k) {
  switch (k) {
    case SweepKind::area: return "area";
    case SweepKind::sampling_rate: return "sampling-rate";
    case SweepKind::repeat: return "repeat";
  }
  return "?";
}

inline SweepKind parse_sweep_kind(std::string_view name) {
  if (name == "area") return SweepKind::area;
  if (name == "sampling-rate") return SweepKind::sampling_rate;
  if (name == "repeat") return SweepKind::repeat;
  throw std::invalid_argument("unknown sweep kind '" + std::string(name) + "'");
}

/// Cartesian experiment: values x strategies x seeds.
///
/// `area` values are square side lengths in meters, `sampling-rate` values
/// are bits per slot. For `repeat` the single value is a run count and the
/// seeds become base_seed + 0 .. count - 1.
struct SweepSpec {
  SweepKind kind{SweepKind::sampling_rate};
  std::vector<double> values;
  std::vector<Strategy> strategies;
  std::vector<std::uint64_t> seeds;
  std::int64_t slots{600};
};

/// Seeds base, base + 1, ..., base + count - 1.
inline std::vector<std::uint64_t> consecutive_seeds(std::uint64_t base, std::size_t count) {
  std::vector<std::uint64_t> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = base + i;
  return out;
}

struct SweepCell {
  std::size_t index{0};
  double value{0.0};
  Strategy strategy{Strategy::uts};
  std::uint64_t seed{0};
  ScenarioConfig config;
};

struct CellResult {
  SweepCell cell;
  double eta{0.0};
  double mean_waypoint_throughput_bits{0.0};
  double wall_time_seconds{0.0};
  std::int64_t simulated_slots{0};
  std::string trace_file;
};

inline void validate_sweep(const SweepSpec& spec) {
  if (spec.values.empty()) throw std::invalid_argument("sweep: values must not be empty");
  if (spec.strategies.empty()) throw std::invalid_argument("sweep: strategies must not be empty");
  if (spec.kind != SweepKind::repeat && spec.seeds.empty()) throw std::invalid_argument("sweep: seeds must not be empty");
  if (spec.kind == SweepKind::repeat && (spec.values.size() != 1 || spec.values[0] < 1))
    throw std::invalid_argument("sweep: repeat takes exactly one positive run count");
}

/// Expands the spec into cells in (value, strategy, seed) order.
inline std::vector<SweepCell> expand_sweep(const SweepSpec& spec, const ScenarioConfig& base) {
  validate_sweep(spec);
  std::vector<double> values = spec.values;
  std::vector<std::uint64_t> seeds = spec.seeds;
  if (spec.kind == SweepKind::repeat) {
    const auto count = static_cast<std::size_t>(spec.values[0]);
    seeds = consecutive_seeds(spec.seeds.empty() ? base.rng_seed : spec.seeds.front(), count);
  }

  std::vector<SweepCell> cells;
  for (double value : values) {
    ScenarioConfig cfg = base;
    cfg.max_slots = spec.slots;
    if (spec.kind == SweepKind::area) {
      cfg.area_width = value;
      cfg.area_height = value;
    } else if (spec.kind == SweepKind::sampling_rate) {
      cfg.sampling_rate_s = static_cast<std::int64_t>(value);
    }
    validate_config(cfg);
    for (Strategy strategy : spec.strategies)
      for (std::uint64_t seed : seeds) {
        cfg.rng_seed = seed;
        cells.push_back({cells.size(), value, strategy, seed, cfg});
      }
  }
  return cells;
}

/// Runs every cell on up to `jobs` threads. Results come back in cell order
/// regardless of completion order. `on_trace` sees each finished trace (on
/// the worker thread) and returns the file it wrote, if any. The first
/// exception stops the remaining cells and is rethrown.
inline std::vector<CellResult> run_cells(
    const std::vector<SweepCell>& cells, unsigned jobs,
    const std::function<std::string(const SweepCell&, const SimulationTrace&)>& on_trace = {}) {
  std::vector<CellResult> results(cells.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&] {
    while (!failed) {
      const std::size_t i = next++;
      if (i >= cells.size()) return;
      try {
        const SweepCell& cell = cells[i];
        SimulationTrace trace = run(cell.config, cell.strategy, cell.seed);
        CellResult r;
        r.cell = cell;
        r.eta = trace.eta;
        r.mean_waypoint_throughput_bits = trace.mean_waypoint_throughput_bits;
        r.wall_time_seconds = trace.wall_time_seconds;
        r.simulated_slots = static_cast<std::int64_t>(trace.slots.size());
        if (on_trace) r.trace_file = on_trace(cell, trace);
        results[i] = std::move(r);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };

  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(1, cells.size()))));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  return results;
}

/// Per-(value, strategy) mean and standard deviation of eta and throughput,
/// plus the individual runs.
inline nlohmann::json sweep_summary(const SweepSpec& spec, const std::vector<CellResult>& results) {
  using nlohmann::json;
  json cells = json::array();
  for (double value : spec.values) {
    for (Strategy strategy : spec.strategies) {
      std::vector<double> etas, throughputs, walls;
      json runs = json::array();
      for (const auto& r : results) {
        if (r.cell.value != value || r.cell.strategy != strategy) continue;
        etas.push_back(r.eta);
        throughputs.push_back(r.mean_waypoint_throughput_bits);
        walls.push_back(r.wall_time_seconds);
        runs.push_back({{"seed", r.cell.seed},
                        {"eta", r.eta},
                        {"mean_waypoint_throughput_bits", r.mean_waypoint_throughput_bits},
                        {"wall_time_seconds", r.wall_time_seconds},
                        {"simulated_slots", r.simulated_slots},
                        {"trace_file", r.trace_file}});
      }
      const auto eta = io::summarize(etas);
      const auto thr = io::summarize(throughputs);
      const auto wall = io::summarize(walls);
      cells.push_back({{"value", value},
                       {"strategy", std::string(to_string(strategy))},
                       {"runs", etas.size()},
                       {"eta_mean", eta.mean},
                       {"eta_stddev", eta.stddev},
                       {"throughput_mean", thr.mean},
                       {"throughput_stddev", thr.stddev},
                       {"wall_time_mean", wall.mean},
                       {"per_run", std::move(runs)}});
    }
  }
  json strategies = json::array();
  for (Strategy s : spec.strategies) strategies.push_back(std::string(to_string(s)));
  return {{"kind", std::string(to_string(spec.kind))},
          {"values", spec.values},
          {"strategies", strategies},
          {"slots", spec.slots},
          {"cells", std::move(cells)}};
}

}  // namespace uavdc
