// Batch driver for the UAV data-collection simulator.
//
//   uavdc validate --config scenario.cfg
//   uavdc run      --config scenario.cfg --strategy uts --seed 7 --out out/
//   uavdc sweep    --kind sampling-rate --values 60:180:20 --seeds 20 --out out/

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "uavdc/engine.hpp"
#include "uavdc/io.hpp"
#include "uavdc/sweep.hpp"

namespace fs = std::filesystem;
using namespace uavdc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitInvalid = 2;

#ifndef UAVDC_VERSION
#define UAVDC_VERSION "dev"
#endif

struct CommonOptions {
  std::string config_path;
  std::optional<std::int64_t> slots;
  std::string channel;
  bool literal_loss{false};
  bool literal_eta{false};
  bool static_gains{false};
  bool covering_waypoint{false};
  bool literal_score{false};
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "Scenario file (key = value lines); reference values if omitted");
  cmd->add_option("--slots", o.slots, "Override max_slots");
  cmd->add_option("--channel", o.channel, "deterministic-los | probabilistic-los")
      ->check(CLI::IsMember({"deterministic-los", "probabilistic-los"}));
  cmd->add_flag("--literal-loss", o.literal_loss, "Charge overflow ignoring the slot's throughput");
  cmd->add_flag("--literal-eta", o.literal_eta, "Divide total loss by s*T only");
  cmd->add_flag("--static-gains", o.static_gains, "Draw reference gains once at deployment");
  cmd->add_flag("--covering-waypoint", o.covering_waypoint, "Keep every scheduled node within d_c of the waypoint");
  cmd->add_flag("--literal-score", o.literal_score, "Score sets by free space only, full sets only");
}

/// Config file plus command-line overrides. Parse problems are reported as
/// a ConfigParseError, unreadable files as runtime_error.
ScenarioConfig build_config(const CommonOptions& o) {
  ScenarioConfig cfg = o.config_path.empty() ? reference_config() : io::load_config(o.config_path);
  if (o.slots) cfg.max_slots = *o.slots;
  if (!o.channel.empty()) cfg.channel_kind = io::parse_channel_kind(o.channel);
  if (o.literal_loss) cfg.loss_mode = LossMode::literal;
  if (o.literal_eta) cfg.eta_mode = EtaMode::literal;
  if (o.static_gains) cfg.static_gains = true;
  if (o.covering_waypoint) cfg.waypoint_mode = WaypointMode::covering;
  if (o.literal_score) cfg.score_mode = ScoreMode::literal;
  return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out.flush()) throw std::runtime_error("write failed for '" + path.string() + "'");
}

void prepare_out_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw std::runtime_error("cannot create output directory '" + dir.string() + "'");
  const fs::path probe = dir / ".uavdc-write-test";
  {
    std::ofstream test(probe);
    if (!test) throw std::runtime_error("output directory '" + dir.string() + "' is not writable");
  }
  fs::remove(probe, ec);
}

std::string trace_name(std::string_view prefix, Strategy strategy, std::uint64_t seed) {
  std::ostringstream os;
  os << "trace_" << prefix << to_string(strategy) << "_seed" << seed << ".csv";
  return os.str();
}

nlohmann::json manifest(const std::string& command, const ScenarioConfig& cfg, const std::vector<std::string>& argv) {
  return {{"artifact", "uavdc"},
          {"version", UAVDC_VERSION},
          {"command", command},
          {"argv", argv},
          {"config", io::format_config(cfg)}};
}

int report_config_error(const std::exception& e) {
  std::cerr << "error: " << e.what() << '\n';
  return kExitInvalid;
}

/// Parses "a,b,c" or "start:stop:step" (inclusive) into numbers.
std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::istringstream in(text);
    std::string part;
    std::vector<double> parts;
    while (std::getline(in, part, ':')) parts.push_back(std::stod(part));
    if (parts.size() != 3 || parts[2] <= 0) throw std::invalid_argument("range must be start:stop:step with step > 0");
    for (double v = parts[0]; v <= parts[1] + 1e-9 * parts[2]; v += parts[2]) out.push_back(v);
    return out;
  }
  std::istringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) out.push_back(std::stod(part));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  CLI::App app{"Time-slotted UAV data-collection simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", UAVDC_VERSION);

  CommonOptions validate_opts;
  auto* validate_cmd = app.add_subcommand("validate", "Check a scenario file and list every violation");
  add_common(validate_cmd, validate_opts);

  CommonOptions run_opts;
  std::string run_strategy = "uts";
  std::optional<std::uint64_t> run_seed;
  std::string run_out = ".";
  auto* run_cmd = app.add_subcommand("run", "Simulate one flight and write its trace CSV");
  add_common(run_cmd, run_opts);
  run_cmd->add_option("--strategy", run_strategy, "uts | rfs | gfs")->check(CLI::IsMember({"uts", "rfs", "gfs"}));
  run_cmd->add_option("--seed", run_seed, "Deployment / randomness seed (default: rng_seed from config)");
  run_cmd->add_option("--out", run_out, "Output directory");

  CommonOptions sweep_opts;
  std::string sweep_kind = "sampling-rate";
  std::string sweep_values = "60:180:20";
  std::vector<std::string> sweep_strategies{"uts", "rfs", "gfs"};
  std::size_t sweep_seed_count = 20;
  std::optional<std::uint64_t> sweep_base_seed;
  std::string sweep_out = "sweep-out";
  unsigned sweep_jobs = std::max(1u, std::thread::hardware_concurrency());
  auto* sweep_cmd = app.add_subcommand("sweep", "Run values x strategies x seeds and summarize eta");
  add_common(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--kind", sweep_kind, "area | sampling-rate | repeat")
      ->check(CLI::IsMember({"area", "sampling-rate", "repeat"}));
  sweep_cmd->add_option("--values", sweep_values, "Comma list or start:stop:step (repeat: run count)");
  sweep_cmd->add_option("--strategies", sweep_strategies, "Subset of uts rfs gfs")
      ->delimiter(',')
      ->check(CLI::IsMember({"uts", "rfs", "gfs"}));
  sweep_cmd->add_option("--seeds", sweep_seed_count, "Seeds per cell (base_seed + run index)");
  sweep_cmd->add_option("--base-seed", sweep_base_seed, "First seed (default: rng_seed from config)");
  sweep_cmd->add_option("--out", sweep_out, "Output directory");
  sweep_cmd->add_option("--jobs", sweep_jobs, "Concurrent cells")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  if (validate_cmd->parsed()) {
    try {
      const ScenarioConfig cfg = build_config(validate_opts);
      const auto violations = check_config(cfg);
      if (!violations.empty()) return report_config_error(ConfigError(violations));
      std::cout << "config ok\n";
      return kExitOk;
    } catch (const io::ConfigParseError& e) {
      return report_config_error(e);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kExitRuntime;
    }
  }

  if (run_cmd->parsed()) {
    ScenarioConfig cfg;
    try {
      cfg = build_config(run_opts);
      validate_config(cfg);
    } catch (const io::ConfigParseError& e) {
      return report_config_error(e);
    } catch (const ConfigError& e) {
      return report_config_error(e);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kExitRuntime;
    }

    std::vector<fs::path> written;
    try {
      const Strategy strategy = parse_strategy(run_strategy);
      const std::uint64_t seed = run_seed.value_or(cfg.rng_seed);
      const fs::path out_dir(run_out);
      prepare_out_dir(out_dir);

      const SimulationTrace trace = run(cfg, strategy, seed);
      const fs::path csv = out_dir / trace_name("", strategy, seed);
      write_text(csv, io::trace_csv(trace));
      written.push_back(csv);

      auto m = manifest("run", trace.config, args);
      m["strategy"] = std::string(to_string(strategy));
      m["seed"] = seed;
      m["files"] = {csv.filename().string()};
      m["eta"] = trace.eta;
      m["mean_waypoint_throughput_bits"] = trace.mean_waypoint_throughput_bits;
      const fs::path manifest_path = out_dir / ("manifest_" + std::string(to_string(strategy)) + "_seed" +
                                                std::to_string(seed) + ".json");
      write_text(manifest_path, m.dump(2) + "\n");
      written.push_back(manifest_path);

      std::printf("strategy=%s seed=%llu eta=%.9e mean_waypoint_throughput_bits=%.3f trace=%s\n",
                  std::string(to_string(strategy)).c_str(), static_cast<unsigned long long>(seed), trace.eta,
                  trace.mean_waypoint_throughput_bits, csv.string().c_str());
      return kExitOk;
    } catch (const std::exception& e) {
      std::error_code ec;
      for (const auto& p : written) fs::remove(p, ec);
      std::cerr << "error: " << e.what() << '\n';
      return kExitRuntime;
    }
  }

  // sweep
  ScenarioConfig base;
  SweepSpec spec;
  std::vector<SweepCell> cells;
  try {
    base = build_config(sweep_opts);
    validate_config(base);
    spec.kind = parse_sweep_kind(sweep_kind);
    spec.values = parse_values(sweep_values);
    for (const auto& s : sweep_strategies) spec.strategies.push_back(parse_strategy(s));
    const std::uint64_t first_seed = sweep_base_seed.value_or(base.rng_seed);
    spec.seeds = consecutive_seeds(first_seed, spec.kind == SweepKind::repeat ? 1 : sweep_seed_count);
    spec.slots = base.max_slots;
    cells = expand_sweep(spec, base);
  } catch (const io::ConfigParseError& e) {
    return report_config_error(e);
  } catch (const ConfigError& e) {
    return report_config_error(e);
  } catch (const std::invalid_argument& e) {
    return report_config_error(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }

  std::vector<fs::path> written;
  std::mutex written_mutex;
  try {
    const fs::path out_dir(sweep_out);
    prepare_out_dir(out_dir);

    auto save_trace = [&](const SweepCell& cell, const SimulationTrace& trace) {
      std::ostringstream prefix;
      prefix << to_string(spec.kind) << '_' << io::detail::format_double(cell.value) << '_';
      const fs::path csv = out_dir / trace_name(prefix.str(), cell.strategy, cell.seed);
      {
        std::lock_guard lock(written_mutex);
        written.push_back(csv);
      }
      write_text(csv, io::trace_csv(trace));
      return csv.filename().string();
    };
    const auto results = run_cells(cells, sweep_jobs, save_trace);

    const fs::path summary_path = out_dir / "summary.json";
    written.push_back(summary_path);
    write_text(summary_path, sweep_summary(spec, results).dump(2) + "\n");

    auto m = manifest("sweep", base, args);
    m["kind"] = std::string(to_string(spec.kind));
    m["values"] = spec.values;
    m["strategies"] = sweep_strategies;
    std::vector<std::uint64_t> seeds_used;
    for (const auto& c : cells)
      if (std::find(seeds_used.begin(), seeds_used.end(), c.seed) == seeds_used.end()) seeds_used.push_back(c.seed);
    m["seeds"] = seeds_used;
    m["slots"] = spec.slots;
    std::vector<std::string> files;
    for (const auto& r : results) files.push_back(r.trace_file);
    files.push_back("summary.json");
    m["files"] = files;
    const fs::path manifest_path = out_dir / "manifest.json";
    written.push_back(manifest_path);
    write_text(manifest_path, m.dump(2) + "\n");

    for (const auto& cell : sweep_summary(spec, results)["cells"])
      std::printf("%s=%g strategy=%s runs=%zu eta_mean=%.6e eta_stddev=%.6e throughput_mean=%.1f\n",
                  std::string(to_string(spec.kind)).c_str(), cell["value"].get<double>(),
                  cell["strategy"].get<std::string>().c_str(), cell["runs"].get<std::size_t>(),
                  cell["eta_mean"].get<double>(), cell["eta_stddev"].get<double>(),
                  cell["throughput_mean"].get<double>());
    return kExitOk;
  } catch (const std::exception& e) {
    std::error_code ec;
    for (const auto& p : written) fs::remove(p, ec);
    std::cerr << "error: " << e.what() << " (partial sweep output removed)\n";
    return kExitRuntime;
  }
}
