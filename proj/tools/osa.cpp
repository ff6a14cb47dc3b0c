// osa: fuzzy opportunistic spectrum access experiments.
//
//   osa run      --config FILE [--seed N] [--out DIR] [--policy fls|nsu|both] [--no-plots]
//   osa infer    --descriptors U,M,D [--config FILE]
//   osa grid     [--config FILE] [--out DIR]
//   osa validate --config FILE
//
// Exit codes: 0 success, 2 usage, 3 config validation, 4 runtime.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "osa/osa.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitConfig = 3;
constexpr int kExitRuntime = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

osa::ExperimentSpec load_spec(const std::string& path) {
  if (path.empty()) return osa::parse_config("");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw osa::ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return osa::parse_config(ss.str());
}

osa::DescriptorVector parse_descriptors(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("cannot parse descriptor '" + item + "'");
    }
  }
  if (v.size() != 3 || text.empty() || text.back() == ',') {
    throw UsageError("--descriptors needs exactly three comma-separated numbers");
  }
  return {v[0], v[1], v[2]};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fuzzy-logic opportunistic spectrum access: inference and FLS-vs-NSU simulation"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string policy;
  bool no_plots = false;
  unsigned threads = 0;
  std::string descriptors;

  auto* run = app.add_subcommand("run", "Run the arrival-rate sweep and write CSVs and plot scripts");
  run->add_option("--config", config_path, "Config file (sectioned key=value)");
  run->add_option("--seed", seed, "Base RNG seed (overrides the config)");
  run->add_option("--out", out_dir, "Output directory (overrides the config)");
  run->add_option("--policy", policy, "fls, nsu or both")->check(CLI::IsMember({"fls", "nsu", "both"}));
  run->add_flag("--no-plots", no_plots, "Skip plot scripts");
  run->add_option("--threads", threads, "Worker threads (0 = all cores)");

  auto* infer = app.add_subcommand("infer", "Print the FLS possibility for one descriptor vector");
  infer->add_option("--descriptors", descriptors, "utilization,mobility,distance")->required();
  infer->add_option("--config", config_path, "Config file with MF/rulebase overrides");

  auto* grid = app.add_subcommand("grid", "Write only possibility_grid.csv");
  grid->add_option("--config", config_path, "Config file");
  grid->add_option("--out", out_dir, "Output directory");

  auto* validate = app.add_subcommand("validate", "Check a config file and exit");
  validate->add_option("--config", config_path, "Config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*infer) {
      const auto d = parse_descriptors(descriptors);
      const auto engine = load_spec(config_path).build_engine();
      std::printf("%.4f\n", engine.infer(d));
      return kExitOk;
    }

    auto spec = load_spec(config_path);
    if (*validate) {
      std::printf("ok\n");
      return kExitOk;
    }
    if (!out_dir.empty()) spec.output_dir = out_dir;

    if (*grid) {
      const auto engine = spec.build_engine();
      const std::filesystem::path dir(spec.output_dir);
      osa::ensure_directory(dir);
      osa::write_file_atomic(dir / "possibility_grid.csv", osa::possibility_grid_csv(engine));
      std::printf("wrote %s\n", (dir / "possibility_grid.csv").string().c_str());
      return kExitOk;
    }

    if (seed) spec.sim.rng_seed = *seed;
    if (!policy.empty()) spec.policies = osa::parse_policy(policy);
    if (no_plots) spec.emit_plots = false;
    const auto result = osa::run_experiment(spec, threads);
    for (const auto& p : result.written) std::printf("wrote %s\n", p.string().c_str());
    return kExitOk;
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const osa::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
}
