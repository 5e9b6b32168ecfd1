#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "uavdc/io.hpp"
#include "uavdc/sweep.hpp"

using namespace uavdc;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int cli(const std::string& args) {
  const std::string cmd = std::string(UAVDC_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("uavdc_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(ParseConfig, ReadsKeysCommentsAndBlankLines) {
  const auto cfg = io::parse_config("# scenario\n\nnum_nodes = 50\nv_max=12.5  # slower\nchannel_kind = probabilistic-los\n");
  EXPECT_EQ(cfg.num_nodes, 50);
  EXPECT_DOUBLE_EQ(cfg.v_max, 12.5);
  EXPECT_EQ(cfg.channel_kind, ChannelKind::probabilistic_los);
  EXPECT_EQ(cfg.storage_capacity_b, 30000);
}

TEST(ParseConfig, ErrorsNameTheLine) {
  try {
    io::parse_config("num_nodes = 5\nwarp_speed = 9\n");
    FAIL() << "expected ConfigParseError";
  } catch (const io::ConfigParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  EXPECT_THROW(io::parse_config("num_nodes = five\n"), io::ConfigParseError);
  EXPECT_THROW(io::parse_config("num_nodes 5\n"), io::ConfigParseError);
  EXPECT_THROW(io::parse_config("static_gains = maybe\n"), io::ConfigParseError);
}

TEST(ParseConfig, FormatRoundTrip) {
  ScenarioConfig cfg = reference_config();
  cfg.area_width = 173.25;
  cfg.noise_power = 3.3e-14;
  cfg.uav_start = Vec2{1.5, 2.25};
  cfg.channel_kind = ChannelKind::probabilistic_los;
  cfg.los_params.b = 0.123456789;
  cfg.waypoint_mode = WaypointMode::covering;
  cfg.static_gains = true;
  const auto back = io::parse_config(io::format_config(cfg));
  EXPECT_EQ(io::format_config(back), io::format_config(cfg));
  EXPECT_EQ(back.area_width, 173.25);
  EXPECT_EQ(back.noise_power, 3.3e-14);
  EXPECT_EQ(back.uav_start, cfg.uav_start);
  EXPECT_EQ(back.los_params.b, 0.123456789);
}

TEST(ParseConfig, ShippedReferenceFileIsTheReferenceScenario) {
  const auto cfg = io::load_config(std::string(UAVDC_SOURCE_DIR) + "/configs/reference.cfg");
  EXPECT_EQ(io::format_config(cfg), io::format_config(reference_config()));
  EXPECT_THROW(io::load_config("/nonexistent/scenario.cfg"), std::runtime_error);
}

TEST(TraceCsv, HeaderAndRowCount) {
  ScenarioConfig cfg = reference_config();
  cfg.max_slots = 5;
  const auto csv = io::trace_csv(run(cfg, Strategy::gfs, 1));
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, io::kTraceHeader);
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 5);
}

TEST(Summarize, MeanAndSampleStddev) {
  const auto s = io::summarize({2, 4, 4, 4, 5, 5, 7, 9});
  EXPECT_DOUBLE_EQ(s.mean, 5.0);
  EXPECT_NEAR(s.stddev, std::sqrt(32.0 / 7.0), 1e-12);
  EXPECT_EQ(io::summarize({3.0}).stddev, 0.0);
}

TEST(Sweep, ExpandsValuesStrategiesSeeds) {
  SweepSpec spec;
  spec.kind = SweepKind::area;
  spec.values = {100, 200};
  spec.strategies = {Strategy::uts, Strategy::rfs};
  spec.seeds = consecutive_seeds(7, 3);
  const auto cells = expand_sweep(spec, reference_config());
  ASSERT_EQ(cells.size(), 12u);
  EXPECT_EQ(cells[0].config.area_width, 100.0);
  EXPECT_EQ(cells[0].seed, 7u);
  EXPECT_EQ(cells[2].seed, 9u);
  EXPECT_EQ(cells[3].strategy, Strategy::rfs);
  EXPECT_EQ(cells[6].config.area_height, 200.0);
}

TEST(Sweep, RepeatNeedsOneCount) {
  SweepSpec spec;
  spec.kind = SweepKind::repeat;
  spec.values = {2, 3};
  spec.strategies = {Strategy::uts};
  EXPECT_THROW(validate_sweep(spec), std::invalid_argument);
}

TEST(Cli, ValidateAcceptsReferenceAndRejectsBrokenConfig) {
  const fs::path dir = scratch_dir("validate");
  EXPECT_EQ(cli("validate --config " + std::string(UAVDC_SOURCE_DIR) + "/configs/reference.cfg"), 0);
  std::ofstream(dir / "bad.cfg") << "num_nodes = 0\ncomm_tau_c = 2\n";
  EXPECT_EQ(cli("validate --config " + (dir / "bad.cfg").string()), 2);
  std::ofstream(dir / "garbled.cfg") << "num_nodes = many\n";
  EXPECT_EQ(cli("validate --config " + (dir / "garbled.cfg").string()), 2);
}

TEST(Cli, UnknownFlagIsUsageError) {
  EXPECT_EQ(cli("run --warp 9"), 2);
  EXPECT_EQ(cli("--help"), 0);
}

TEST(Cli, RunIsByteReproducible) {
  const fs::path a = scratch_dir("run_a"), b = scratch_dir("run_b");
  ASSERT_EQ(cli("run --strategy uts --seed 3 --slots 40 --out " + a.string()), 0);
  ASSERT_EQ(cli("run --strategy uts --seed 3 --slots 40 --out " + b.string()), 0);
  const std::string first = slurp(a / "trace_uts_seed3.csv");
  EXPECT_FALSE(first.empty());
  EXPECT_EQ(first, slurp(b / "trace_uts_seed3.csv"));
  EXPECT_TRUE(fs::exists(a / "manifest_uts_seed3.json"));
}

TEST(Cli, SweepWritesSummaryAndManifest) {
  const fs::path dir = scratch_dir("sweep");
  ASSERT_EQ(cli("sweep --kind sampling-rate --values 60,120 --strategies uts,gfs --seeds 2 --slots 20 --jobs 2 --out " +
                dir.string()),
            0);
  const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  EXPECT_FALSE(summary.empty());
  EXPECT_TRUE(fs::exists(dir / "manifest.json"));
  std::size_t traces = 0;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".csv") ++traces;
  EXPECT_EQ(traces, 8u);
}
