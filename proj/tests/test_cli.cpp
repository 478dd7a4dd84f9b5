#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qdm/config.hpp"
#include "qdm/grid_io.hpp"
#include "qdm/scenario.hpp"

using namespace qdm;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios{QDM_SCENARIO_DIR};

int run_cli(const std::string& args) {
  const std::string cmd = std::string(QDM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string read_file(const fs::path& p) {
  std::ifstream is(p);
  std::ostringstream buf;
  buf << is.rdbuf();
  return buf.str();
}

fs::path temp_dir(const char* name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("config schema rejects unknown sections and keys") {
  CHECK_THROWS_AS(config::ConfigFile::parse_string("[nope]\nx = 1\n"),
                  config::ConfigError);
  CHECK_THROWS_AS(config::ConfigFile::parse_string("[spin]\nbogus_key = 1\n"),
                  config::ConfigError);
  CHECK_THROWS_AS(config::ConfigFile::parse_string("[spin]\ncontrast 0.03\n"),
                  config::ConfigError);
  CHECK_THROWS_AS(config::ConfigFile::parse_string("contrast = 0.03\n"),
                  config::ConfigError);
  const auto ok = config::ConfigFile::parse_string(
      "# comment\n[spin]\ncontrast = 0.05  # trailing\n");
  CHECK(ok.get_number("spin", "contrast", 0.0) == doctest::Approx(0.05));
}

TEST_CASE("experiment config applies values and validates physics") {
  const auto cfg = config::ExperimentConfig::from_config(config::ConfigFile::parse_string(
      "[scenario]\nname = t\nseed = 42\noutputs = timing\n"
      "[spin]\ntau_s = 2.0e-6\n[camera]\nn_cycles = 36\n"
      "[field]\naxis = 1-11\n[pipeline]\nmode = gating\n"));
  CHECK(cfg.seed == 42);
  CHECK(cfg.nv.tau == doctest::Approx(2.0e-6));
  CHECK(cfg.cam.n_cycles == 36);
  CHECK(cfg.field.geometry.axis == field::NvAxis::axis_1m11);
  CHECK(cfg.pipe.mode == pipeline::DifferentialMode::gating);
  CHECK_THROWS_AS(config::ExperimentConfig::from_config(config::ConfigFile::parse_string(
                      "[spin]\ncontrast = 1.5\n")),
                  config::ConfigError);
  CHECK_THROWS_AS(config::ExperimentConfig::from_config(config::ConfigFile::parse_string(
                      "[camera]\nnoise = heavy\n")),
                  config::ConfigError);
}

TEST_CASE("bundled scenario configs parse") {
  for (const char* name :
       {"fig2a_sensitivity.ini", "noise_scaling.ini", "static_imaging.ini",
        "picotesla_denoise.ini", "dynamic_cardiac.ini", "spectrum.ini"}) {
    CHECK_NOTHROW(config::ExperimentConfig::from_file(kScenarios / name));
  }
}

TEST_CASE("identical config and seed produce byte-identical manifests") {
  auto cfg = config::ExperimentConfig::from_file(kScenarios / "fig2a_sensitivity.ini");
  cfg.pipe.frames_per_set = 40;  // keep the determinism probe quick
  cfg.field.geometry.width = 32;
  cfg.field.geometry.height = 32;
  scenario::RunOptions opts;
  opts.out_dir = temp_dir("qdm_det_a");
  scenario::run_scenario(cfg, opts);
  const std::string manifest_a = read_file(opts.out_dir / "manifest.txt");
  opts.out_dir = temp_dir("qdm_det_b");
  scenario::run_scenario(cfg, opts);
  const std::string manifest_b = read_file(opts.out_dir / "manifest.txt");
  CHECK(manifest_a == manifest_b);
  CHECK(!manifest_a.empty());

  // a different seed must change the artifacts
  cfg.seed += 1;
  opts.out_dir = temp_dir("qdm_det_c");
  scenario::run_scenario(cfg, opts);
  CHECK(read_file(opts.out_dir / "manifest.txt") != manifest_a);
  fs::remove_all(temp_dir("qdm_det_a").parent_path() / "qdm_det_a");
}

TEST_CASE("artifacts are identical regardless of the thread budget") {
  auto cfg = config::ExperimentConfig::from_file(kScenarios / "picotesla_denoise.ini");
  cfg.outputs = {"field_map"};
  cfg.field.geometry.width = 48;
  cfg.field.geometry.height = 48;
  scenario::RunOptions opts;
  opts.out_dir = temp_dir("qdm_threads_n");
  scenario::run_scenario(cfg, opts);
  const std::string parallel = read_file(opts.out_dir / "manifest.txt");
  setenv("QDM_THREADS", "1", 1);
  opts.out_dir = temp_dir("qdm_threads_1");
  scenario::run_scenario(cfg, opts);
  unsetenv("QDM_THREADS");
  CHECK(read_file(opts.out_dir / "manifest.txt") == parallel);
}

TEST_CASE("cli: exit codes for bad config, missing file and check mode") {
  const fs::path dir = temp_dir("qdm_cli_cfg");
  const fs::path bad = dir / "bad.ini";
  {
    std::ofstream os(bad);
    os << "[spin]\nunknown_thing = 1\n";
  }
  CHECK(run_cli("timing --config " + bad.string() + " --out " + (dir / "o1").string()) == 2);
  CHECK(run_cli("timing --config /nonexistent.ini --out " + (dir / "o2").string()) == 2);
  const fs::path invalid = dir / "invalid.ini";
  {
    std::ofstream os(invalid);
    os << "[field]\nphantom = /missing_phantom.csv\n";
  }
  CHECK(run_cli("simulate-field --config " + invalid.string() + " --out " +
                (dir / "o3").string()) == 3);
  CHECK(run_cli("check") == 0);
  fs::remove_all(dir);
}

TEST_CASE("cli: spectrum and timing scenarios run end to end") {
  const fs::path dir = temp_dir("qdm_cli_run");
  CHECK(run_cli("spectrum --config " + (kScenarios / "spectrum.ini").string() + " --out " +
                dir.string()) == 0);
  CHECK(fs::exists(dir / "spectrum.csv"));
  CHECK(fs::exists(dir / "report.txt"));
  CHECK(fs::exists(dir / "manifest.txt"));
  const std::string report = read_file(dir / "report.txt");
  CHECK(report.find("spectrum.electron_line") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("cli: field simulation emits svg when requested") {
  const fs::path dir = temp_dir("qdm_cli_field");
  auto cfg = config::ExperimentConfig::from_file(kScenarios / "static_imaging.ini");
  cfg.outputs = {"field_map", "timing"};
  cfg.field.geometry.width = 24;
  cfg.field.geometry.height = 24;
  scenario::RunOptions opts;
  opts.out_dir = dir;
  opts.format = "bin";
  const auto result = scenario::run_scenario(cfg, opts);
  CHECK(fs::exists(dir / "field_map.qdmf"));
  const FieldMap read_back = read_field_map(dir / "field_map.qdmf");
  CHECK(read_back.width == 24);
  fs::remove_all(dir);
}

TEST_CASE("waveform file feeds the dynamic chain") {
  auto cfg = config::ExperimentConfig::from_file(kScenarios / "dynamic_cardiac.ini");
  cfg.wave.source = (kScenarios / "data" / "cardiac_1s.csv").string();
  cfg.wave.repeats = 2;
  cfg.field.geometry.width = 24;
  cfg.field.geometry.height = 24;
  const auto dyn = scenario::run_dynamic_chain(cfg);
  CHECK(dyn.trace_t.size() >= 4);
  CHECK(dyn.correlation > 0.9);
}

TEST_CASE("non-differential noise maps stop averaging down") {
  // Without source modulation a drifting pattern survives averaging: the
  // fitted noise-floor exponent is visibly shallower than -1/2.
  auto cfg = config::ExperimentConfig::from_config(config::ConfigFile::parse_string(
      "[field]\nwidth_px = 64\nheight_px = 64\n"
      "[pipeline]\nmode = none\nframes_per_set = 500\nper_frame_noise_t = 9.4e-8\n"));
  cfg.seed = 3;
  const auto drifting = scenario::simulate_noise_set_maps(cfg, 64);
  cfg = config::ExperimentConfig::from_config(config::ConfigFile::parse_string(
      "[field]\nwidth_px = 64\nheight_px = 64\n"
      "[pipeline]\nmode = polarity\nframes_per_set = 500\nper_frame_noise_t = 9.4e-8\n"));
  cfg.seed = 3;
  const auto modulated = scenario::simulate_noise_set_maps(cfg, 64);
  pipeline::NoiseFloorOptions opts;
  opts.t_acq_per_set_s = 1.0;
  const auto floor_drift = pipeline::spatial_noise_floor(drifting, opts);
  const auto floor_mod = pipeline::spatial_noise_floor(modulated, opts);
  CHECK(std::abs(floor_mod.fit_slope + 0.5) < 0.05);
  CHECK(floor_drift.fit_slope > -0.35);
  CHECK(floor_drift.points.back().sigma_spatial_t >
        3.0 * floor_mod.points.back().sigma_spatial_t);
}

TEST_CASE("bundled phantom geometry file loads and renders") {
  const auto phantom = field::load_phantom_csv(kScenarios / "data" / "serpentine.csv");
  CHECK(phantom.current == doctest::Approx(436e-9));
  field::SensingGeometry g;
  g.width = 16;
  g.height = 16;
  field::SourceSet sources;
  sources.phantoms.push_back(phantom);
  const FieldMap m = field::render_map(sources, g);
  double peak = 0.0;
  for (double v : m.values) peak = std::max(peak, std::abs(v));
  CHECK(peak > 1e-9);  // nanotesla scale at 436 nA
}
