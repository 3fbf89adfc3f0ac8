#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "check.hpp"
#include "wavemech/config.hpp"
#include "wavemech/presets.hpp"
#include "wavemech/runner.hpp"

using namespace wavemech;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"({
  "scenario": "unit",
  "grid": {"dim": 1, "n": 256, "bounds": [[-10, 10]]},
  "initial_state": {"kind": "gaussian", "x0": [0], "sigma": 1, "p0": [1]},
  "evolver": "linear",
  "time": {"dt": 0.01, "t_end": 0.1}
})";

std::vector<std::string> issues_of(std::string_view text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.issues();
  }
  return {};
}

bool any_contains(const std::vector<std::string>& v, const std::string& needle) {
  return std::any_of(v.begin(), v.end(), [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

std::string with(const std::string& base, const std::string& from, const std::string& to) {
  std::string s = base;
  const auto at = s.find(from);
  REQUIRE(at != std::string::npos);
  s.replace(at, from.size(), to);
  return s;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("wavemech_unit_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig small_run(std::size_t snapshots_stride = 5) {
  auto cfg = parse_config(kMinimal);
  cfg.scenario = "unit";
  cfg.time.snapshot_stride = snapshots_stride;
  return cfg;
}

}  // namespace

TEST_CASE("config: minimal document gets defaults") {
  const auto cfg = parse_config(kMinimal);
  CHECK(cfg.physics.hbar == 1.0);
  CHECK(cfg.physics.mass == 1.0);
  CHECK(cfg.evolver.kind == EvolverKind::Linear);
  CHECK(cfg.potential.kind == PotentialKind::Free);
  CHECK(cfg.grid.dim == 1);
  CHECK(cfg.probes.empty());
  CHECK_FALSE(cfg.trajectories.has_value());
}

TEST_CASE("config: validation names the offending field") {
  const auto issues = issues_of(with(kMinimal, "\"dt\": 0.01", "\"dt\": 0"));
  REQUIRE_FALSE(issues.empty());
  CHECK(any_contains(issues, "time.dt"));
  CHECK(any_contains(issues_of(with(kMinimal, "\"dt\": 0.01", "\"dt\": -1")), "time.dt"));
}

TEST_CASE("config: classical superposition must be node free") {
  const std::string doc = R"({
    "scenario": "nodes",
    "grid": {"dim": 1, "n": 512, "bounds": [[-8, 8]]},
    "evolver": "classical",
    "initial_state": {"kind": "two_gaussian",
      "first": {"x0": [0], "sigma": 0.8, "p0": [1]}, "second": {"x0": [0], "sigma": 0.8, "p0": [-1]},
      "c1": [1, 0], "c2": [1, 0]},
    "time": {"dt": 0.01, "t_end": 0.5},
    "probes": [{"name": "superposition_violation"}]
  })";
  const auto issues = issues_of(doc);
  REQUIRE_FALSE(issues.empty());
  CHECK(any_contains(issues, "node-free"));
  CHECK(issues_of(with(doc, "\"c1\": [1, 0]", "\"c1\": [3, 0]")).empty());
}

TEST_CASE("config: every problem is reported, unknown keys included") {
  const std::string doc = with(with(kMinimal, "\"dt\": 0.01", "\"dt\": 0, \"bogus\": 1"), "\"n\": 256", "\"n\": 1");
  const auto issues = issues_of(doc);
  CHECK(issues.size() >= 3);
  CHECK(any_contains(issues, "time.dt"));
  CHECK(any_contains(issues, "time.bogus"));
  CHECK(any_contains(issues, "grid.n"));
  CHECK(error_code_of([&] { parse_config(doc); }) == ErrorCode::ValidationError);
}

TEST_CASE("config: malformed documents are parse errors") {
  CHECK(error_code_of([] { parse_config("{\"grid\": "); }) == ErrorCode::ParseError);
  CHECK(error_code_of([] { parse_config("{\"scenario\": 1,}"); }) == ErrorCode::ParseError);
}

TEST_CASE("config: every preset validates and survives a round trip") {
  REQUIRE(presets().size() >= 12);
  for (const auto& p : presets()) {
    CAPTURE(p.config.scenario);
    CHECK(validation_issues(p.config).empty());
    CHECK(parse_config(serialize_config(p.config)) == p.config);
  }
  for (const char* name : {"dispersion", "soliton_stability", "harmonic_ehrenfest", "focusing_caustic",
                           "interference_classical", "interference_linear", "pure_vs_mixed", "exchange_term",
                           "winding", "superposition_probe", "r_linearity", "indirect_momentum"}) {
    CHECK(find_preset(name).has_value());
  }
  CHECK_FALSE(find_preset("nope").has_value());
}

TEST_CASE("runner: no probes means no probes.csv") {
  const auto dir = scratch("noprobe");
  const auto m = run(small_run(), RunOptions{dir.string(), std::nullopt});
  CHECK(m.status == RunStatus::Completed);
  CHECK(exit_code(m.status) == 0);
  CHECK(fs::exists(dir / "diagnostics.csv"));
  CHECK(fs::exists(dir / "manifest.json"));
  CHECK_FALSE(fs::exists(dir / "probes.csv"));
  CHECK(std::any_of(m.files.begin(), m.files.end(), [](const OutputFile& f) { return f.path == "diagnostics.csv"; }));
  fs::remove_all(dir);
}

TEST_CASE("runner: three snapshots give three zero-padded field files") {
  const auto dir = scratch("fields");
  auto cfg = small_run(5);  // steps 0, 5, 10
  const auto m = run(cfg, RunOptions{dir.string(), std::nullopt});
  REQUIRE(m.status == RunStatus::Completed);
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(dir / "fields")) names.push_back(e.path().filename().string());
  std::sort(names.begin(), names.end());
  CHECK(names == std::vector<std::string>{"field_00000.csv", "field_00001.csv", "field_00002.csv"});
  fs::remove_all(dir);
}

TEST_CASE("runner: reruns reproduce every data file") {
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  auto cfg = small_run(2);
  cfg.trajectories = TrajectorySpec{50, 9};
  cfg.probes.push_back(ProbeSpec{"uncertainty", std::nullopt, {}});
  const auto ma = run(cfg, RunOptions{a.string(), std::nullopt});
  const auto mb = run(cfg, RunOptions{b.string(), std::nullopt});
  REQUIRE(ma.files.size() == mb.files.size());
  for (std::size_t i = 0; i < ma.files.size(); ++i) {
    CHECK(ma.files[i].path == mb.files[i].path);
    CHECK(ma.files[i].sha256 == mb.files[i].sha256);
    CHECK(ma.files[i].sha256 == sha256_file((a / ma.files[i].path).string()));
  }
  const auto mc = run(cfg, RunOptions{b.string(), std::uint64_t{10}});
  const auto traj = [](const RunManifest& m) {
    for (const auto& f : m.files) if (f.path == "trajectories.csv") return f.sha256;
    return std::string();
  };
  CHECK(traj(mc) != traj(ma));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("runner: exit codes") {
  CHECK(exit_code(RunStatus::Completed) == 0);
  CHECK(exit_code(RunStatus::ConfigError) == 2);
  CHECK(exit_code(RunStatus::Caustic) == 3);
  CHECK(exit_code(RunStatus::Blowup) == 3);
  CHECK(exit_code(RunStatus::IoError) == 4);
  CHECK(to_string(RunStatus::Caustic) == "caustic");
  CHECK(to_string(RunStatus::Completed) == "completed");
}

TEST_CASE("runner: caustic run still writes a manifest") {
  const auto dir = scratch("caustic");
  auto cfg = *find_preset("focusing_caustic");
  const auto m = run(cfg, RunOptions{dir.string(), std::nullopt});
  CHECK(m.status == RunStatus::Caustic);
  REQUIRE(m.caustic.has_value());
  CHECK(std::abs(m.caustic->time - 1.0) < 0.1);
  const auto text = slurp(dir / "manifest.json");
  CHECK(text.find("\"status\": \"caustic\"") != std::string::npos);
  CHECK(fs::exists(dir / "diagnostics.csv"));
  fs::remove_all(dir);
}

TEST_CASE("runner: configuration and I/O failures") {
  const auto dir = scratch("bad");
  fs::create_directories(dir);
  {
    std::ofstream(dir / "broken.json") << "{\"grid\": ";
  }
  const auto bad = run_file((dir / "broken.json").string(), RunOptions{(dir / "out").string(), std::nullopt});
  CHECK(bad.status == RunStatus::ConfigError);
  CHECK(exit_code(bad.status) == 2);
  CHECK(fs::exists(dir / "out" / "manifest.json"));

  const auto missing = run_file((dir / "absent.json").string(), {});
  CHECK(missing.status == RunStatus::IoError);

  {
    std::ofstream(dir / "plain_file") << "x";
  }
  const auto io = run(small_run(), RunOptions{(dir / "plain_file").string(), std::nullopt});
  CHECK(io.status == RunStatus::IoError);
  CHECK(exit_code(io.status) == 4);
  fs::remove_all(dir);
}
