#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "osa/osa.hpp"

using namespace osa;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("osa_experiment_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ExperimentSpec small_spec(const fs::path& out) {
  ExperimentSpec spec;
  spec.sim.sim_duration = 60;
  spec.sim.replications = 2;
  spec.output_dir = out.string();
  return spec;
}

struct CliResult {
  int code;
  std::string out;
};

CliResult cli(const std::string& args) {
  const auto dir = fs::temp_directory_path() / "osa_experiment_test_cli";
  fs::create_directories(dir);
  const auto capture = dir / "stdout.txt";
  const std::string cmd = std::string("\"") + OSA_CLI_PATH + "\" " + args + " > \"" + capture.string() + "\" 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(capture)};
}

}  // namespace

TEST(CsvNumber, Goldens) {
  EXPECT_EQ(csv_number(0.123456789), "0.123457");
  EXPECT_EQ(csv_number(4.5e7), "4.5e+07");
  EXPECT_EQ(csv_number(1.0), "1");
  EXPECT_EQ(csv_number(0.0), "0");
  EXPECT_EQ(csv_number(-0.0), "0");
  EXPECT_EQ(csv_number(28.59), "28.59");
}

TEST(MetricsCsv, LineGolden) {
  MetricsRow r;
  r.arrival_rate = 3;
  r.policy = Policy::nsu;
  r.blocking_probability = 0.0123456789;
  r.mean_free_spectrum = 10.5;
  r.mean_allocated_spectrum = 2.25;
  r.interference_spread = 3.5e7;
  r.system_efficiency = 0.987654321;
  r.channel_utilization = 0.15;
  EXPECT_EQ(metrics_csv_line(r), "3,nsu,0.0123457,10.5,2.25,3.5e+07,0.987654,0.15");
  EXPECT_EQ(std::string(kMetricsHeader),
            "arrival_rate,policy,blocking,free_spectrum,allocated_spectrum,interference_hz,system_efficiency,"
            "channel_utilization");
}

TEST(PossibilityGrid, ShapeAndCorners) {
  const auto grid = possibility_grid_csv(FlsEngine::paper_default());
  EXPECT_EQ(count_lines(grid), 21u * 21u * 21u + 1u);
  std::istringstream in(grid);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, kGridHeader);
  std::getline(in, line);
  EXPECT_EQ(line, "0,0,0,28.59");
  EXPECT_NE(grid.find("\n100,0,10,54.75\n"), std::string::npos);
}

TEST(PlotScripts, SevenFigures) {
  const auto scripts = plot_scripts();
  ASSERT_EQ(scripts.size(), 7u);
  for (const auto& s : scripts) {
    EXPECT_TRUE(s.filename.ends_with(".gp"));
    EXPECT_NE(s.body.find("set output"), std::string::npos);
  }
}

TEST(RunExperiment, WritesAllArtifacts) {
  const auto dir = scratch("artifacts");
  const auto res = run_experiment(small_spec(dir / "out"));
  EXPECT_EQ(res.written.size(), 9u);
  for (const auto& p : res.written) EXPECT_TRUE(fs::exists(p)) << p;
  const auto metrics = slurp(dir / "out" / "metrics.csv");
  EXPECT_EQ(count_lines(metrics), 21u);
  EXPECT_TRUE(metrics.starts_with(std::string(kMetricsHeader) + "\n1,fls,"));
  EXPECT_NE(metrics.find("\n1,nsu,"), std::string::npos);
  EXPECT_NE(metrics.find("\n10,nsu,"), std::string::npos);
  for (const auto& e : fs::directory_iterator(dir / "out")) {
    EXPECT_FALSE(e.path().filename().string().ends_with(".tmp"));
  }
}

TEST(RunExperiment, NoPlotsAndSinglePolicy) {
  const auto dir = scratch("single");
  auto spec = small_spec(dir);
  spec.emit_plots = false;
  spec.policies = {Policy::nsu};
  spec.sim.arrival_rates = {2, 4};
  const auto res = run_experiment(spec);
  EXPECT_EQ(res.written.size(), 2u);
  const auto metrics = slurp(dir / "metrics.csv");
  EXPECT_EQ(count_lines(metrics), 3u);
  EXPECT_EQ(metrics.find(",fls,"), std::string::npos);
}

TEST(RunExperiment, ByteDeterministic) {
  const auto dir = scratch("determinism");
  auto spec = small_spec(dir / "a");
  run_experiment(spec, 1);
  spec.output_dir = (dir / "b").string();
  run_experiment(spec, 4);
  EXPECT_EQ(slurp(dir / "a" / "metrics.csv"), slurp(dir / "b" / "metrics.csv"));
  EXPECT_EQ(slurp(dir / "a" / "possibility_grid.csv"), slurp(dir / "b" / "possibility_grid.csv"));
}

TEST(RunExperiment, UnwritableDirectoryFailsCleanly) {
  const auto dir = scratch("unwritable");
  { std::ofstream(dir / "blocker") << "x"; }
  auto spec = small_spec(dir / "blocker" / "out");
  EXPECT_THROW(run_experiment(spec), RuntimeError);
  std::size_t entries = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    (void)e;
    ++entries;
  }
  EXPECT_EQ(entries, 1u);
}

TEST(RunExperiment, InvalidSpecWritesNothing) {
  const auto dir = scratch("invalid");
  auto spec = small_spec(dir / "out");
  spec.sim.num_channels = 0;
  EXPECT_THROW(run_experiment(spec), ConfigError);
  EXPECT_FALSE(fs::exists(dir / "out"));
}

TEST(Cli, InferGoldens) {
  EXPECT_EQ(cli("infer --descriptors 0,0,0").out, "28.5900\n");
  EXPECT_EQ(cli("infer --descriptors 100,0,10").out, "54.7500\n");
  EXPECT_EQ(cli("infer --descriptors 37.5,0,0").out, "35.8350\n");
  EXPECT_EQ(cli("infer --descriptors 0,0,0").code, 0);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(cli("infer --descriptors 1,2").code, 2);
  EXPECT_EQ(cli("infer --descriptors 1,x,2").code, 2);
  EXPECT_EQ(cli("frobnicate").code, 2);
  EXPECT_EQ(cli("").code, 2);

  const auto dir = scratch("cli_codes");
  { std::ofstream(dir / "bad.cfg") << "[simulation]\nchannels = 0\n"; }
  EXPECT_EQ(cli("validate --config \"" + (dir / "bad.cfg").string() + "\"").code, 3);
  EXPECT_EQ(cli("run --config \"" + (dir / "bad.cfg").string() + "\"").code, 3);
  EXPECT_EQ(cli("validate --config \"" + (dir / "missing.cfg").string() + "\"").code, 3);

  { std::ofstream(dir / "blocker") << "x"; }
  { std::ofstream(dir / "tiny.cfg") << "[simulation]\nduration = 20\nreplications = 1\narrival_rates = 1\n"; }
  EXPECT_EQ(cli("run --config \"" + (dir / "tiny.cfg").string() + "\" --out \"" + (dir / "blocker" / "x").string() + "\"")
                .code,
            4);
  const auto ok = cli("validate --config \"" + (dir / "tiny.cfg").string() + "\"");
  EXPECT_EQ(ok.code, 0);
  EXPECT_EQ(ok.out, "ok\n");
}

TEST(Cli, RunLeavesConfigUntouchedAndHonoursOverrides) {
  const auto dir = scratch("cli_run");
  const std::string cfg_text =
      "[simulation]\nduration = 30\nreplications = 1\narrival_rates = 1, 2\n[output]\ndir = ignored\n";
  { std::ofstream(dir / "exp.cfg") << cfg_text; }
  const auto r = cli("run --config \"" + (dir / "exp.cfg").string() + "\" --out \"" + (dir / "out").string() +
                     "\" --policy fls --no-plots --seed 9");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(slurp(dir / "exp.cfg"), cfg_text);
  const auto metrics = slurp(dir / "out" / "metrics.csv");
  EXPECT_EQ(count_lines(metrics), 3u);
  EXPECT_EQ(metrics.find(",nsu,"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "out" / "fig4_blocking.gp"));
  EXPECT_FALSE(fs::exists(dir / "ignored"));

  ExperimentSpec spec = parse_config(cfg_text);
  spec.sim.rng_seed = 9;
  spec.policies = {Policy::fls};
  spec.emit_plots = false;
  spec.output_dir = (dir / "lib").string();
  run_experiment(spec);
  EXPECT_EQ(slurp(dir / "lib" / "metrics.csv"), metrics);
}

TEST(Cli, GridSubcommand) {
  const auto dir = scratch("cli_grid");
  EXPECT_EQ(cli("grid --out \"" + dir.string() + "\"").code, 0);
  EXPECT_EQ(slurp(dir / "possibility_grid.csv"), possibility_grid_csv(FlsEngine::paper_default()));
}
