// qdm: scenario runner for the QDM measurement-chain simulator.
//
// Subcommands: simulate-field, simulate-frames, analyze, denoise, spectrum,
// timing, check, report. Exit codes: 0 success, 2 config schema violation,
// 3 runtime simulation error, 4 failed checks in check mode.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include "qdm/config.hpp"
#include "qdm/scenario.hpp"

namespace {

struct CliState {
  std::string config_path;
  std::string out_dir = "out";
  std::string format = "csv";
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool check_after = false;
};

int run(const CliState& st, const std::vector<std::string>& outputs, bool outputs_from_config) {
  qdm::config::ExperimentConfig cfg;
  if (!st.config_path.empty()) {
    cfg = qdm::config::ExperimentConfig::from_file(st.config_path);
  } else if (outputs_from_config) {
    throw qdm::config::ConfigError("report requires --config");
  }
  if (st.seed_set) cfg.seed = st.seed;
  if (!outputs_from_config) cfg.outputs = outputs;

  qdm::scenario::RunOptions opts;
  opts.out_dir = st.out_dir;
  opts.format = st.format;
  const auto result = qdm::scenario::run_scenario(cfg, opts);
  std::cout << result.report.render();
  std::cout << "artifacts: " << result.artifacts.size() << " file(s) under " << st.out_dir
            << "\n";
  if (st.check_after) {
    const int failures = qdm::scenario::run_quick_checks(std::cout);
    if (failures > 0) return 4;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qdm: quantum diamond microscope measurement-chain simulator"};
  app.require_subcommand(1);

  CliState st;
  app.add_option("--config", st.config_path, "scenario config file");
  app.add_option("--out", st.out_dir, "output directory");
  app.add_option("--format", st.format, "artifact format: csv, bin or svg")
      ->check(CLI::IsMember({"csv", "bin", "svg"}));
  app.add_option("--seed", st.seed, "override the scenario RNG seed")
      ->each([&st](const std::string&) { st.seed_set = true; });
  app.add_flag("--check", st.check_after, "run the built-in checks after the command");

  std::vector<std::string> outputs;
  bool outputs_from_config = false;

  // Global flags may follow the subcommand (qdm timing --config ...).
  const auto sub = [&](const char* name, const char* help) {
    auto* s = app.add_subcommand(name, help);
    s->fallthrough();
    return s;
  };
  sub("simulate-field", "render the configured sources into a field map")
      ->callback([&] { outputs = {"field_map"}; });
  sub("simulate-frames", "expose the configured scene into camera frames")
      ->callback([&] { outputs = {"frame_stack"}; });
  sub("analyze", "sensitivity map, noise-floor scaling and Allan deviation")
      ->callback([&] { outputs = {"sensitivity_map", "noise_floor", "allan"}; });
  sub("denoise", "NLM vs Gaussian denoising comparison")
      ->callback([&] { outputs = {"denoise"}; });
  sub("spectrum", "bath-spin resonance spectrum")
      ->callback([&] { outputs = {"spectrum"}; });
  sub("timing", "acquisition and wall-clock time model")
      ->callback([&] { outputs = {"timing"}; });
  sub("report", "run every output requested in the config")
      ->callback([&] { outputs_from_config = true; });
  auto* check_cmd = sub("check", "run the built-in quick checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (check_cmd->parsed()) {
      const int failures = qdm::scenario::run_quick_checks(std::cout);
      if (failures > 0) {
        std::cout << failures << " check(s) failed\n";
        return 4;
      }
      std::cout << "all checks passed\n";
      return 0;
    }
    return run(st, outputs, outputs_from_config);
  } catch (const qdm::config::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
