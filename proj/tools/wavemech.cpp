#include <glob.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <thread>

#include <CLI11.hpp>

#include "wavemech/presets.hpp"
#include "wavemech/runner.hpp"

namespace fs = std::filesystem;
using namespace wavemech;

namespace {

void report(const std::string& label, const RunManifest& m) {
  std::cout << label << ": " << to_string(m.status);
  if (!m.out_dir.empty()) std::cout << " -> " << m.out_dir;
  std::cout << '\n';
  if (!m.message.empty()) std::cerr << "  " << m.message << '\n';
  if (m.caustic) std::cerr << "  caustic at t = " << m.caustic->time << '\n';
}

std::vector<std::string> expand(const std::string& pattern) {
  glob_t g{};
  std::vector<std::string> out;
  if (::glob(pattern.c_str(), 0, nullptr, &g) == 0) {
    for (std::size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
  }
  globfree(&g);
  std::sort(out.begin(), out.end());
  return out;
}

// A bare preset name runs the built-in entry when no such file exists.
RunManifest run_target(const std::string& target, const RunOptions& opts) {
  if (!fs::exists(target)) {
    if (auto cfg = find_preset(target)) return run(*cfg, opts);
  }
  return run_file(target, opts);
}

int cmd_sweep(const std::string& pattern, const std::optional<std::string>& base, std::size_t jobs) {
  const auto files = expand(pattern);
  if (files.empty()) {
    std::cerr << "no config files match " << pattern << '\n';
    return 2;
  }
  // Give every run its own directory: under --out by file stem, otherwise the
  // configured one, disambiguated when two configs share it.
  std::vector<RunOptions> opts(files.size());
  std::map<std::string, int> seen;
  for (std::size_t i = 0; i < files.size(); ++i) {
    const std::string stem = fs::path(files[i]).stem().string();
    if (base) {
      opts[i].out_dir = (fs::path(*base) / stem).string();
      continue;
    }
    try {
      const auto cfg = load_config(files[i]);
      std::string dir = cfg.output_dir.empty() ? "out/" + stem : cfg.output_dir;
      if (seen[dir]++ > 0) dir += "-" + stem;
      opts[i].out_dir = dir;
    } catch (const std::exception&) {
      // run_file reports the parse error.
    }
  }

  int worst = 0;
  std::size_t next = 0;
  while (next < files.size()) {
    std::vector<std::future<RunManifest>> batch;
    std::vector<std::size_t> ids;
    for (; next < files.size() && batch.size() < jobs; ++next) {
      ids.push_back(next);
      batch.push_back(std::async(std::launch::async, [&, i = next] { return run_file(files[i], opts[i]); }));
    }
    for (std::size_t k = 0; k < batch.size(); ++k) {
      const auto m = batch[k].get();
      report(files[ids[k]], m);
      worst = std::max(worst, exit_code(m.status));
    }
  }
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear and classical Schroedinger evolution experiments"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "Run one experiment config (or a built-in preset by name)");
  std::string target;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  run_cmd->add_option("config", target, "Config file")->required();
  run_cmd->add_option("--out", out_dir, "Output directory (overrides output.directory)");
  run_cmd->add_option("--seed", seed, "Seed for trajectory sampling and measurement probes");

  auto* sweep_cmd = app.add_subcommand("sweep", "Run every config matching a glob, in parallel");
  std::string pattern;
  std::optional<std::string> sweep_out;
  std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
  sweep_cmd->add_option("glob", pattern, "Config glob, e.g. 'presets/*.json'")->required();
  sweep_cmd->add_option("--out", sweep_out, "Base directory; each run writes to <base>/<config stem>");
  sweep_cmd->add_option("-j,--jobs", jobs, "Concurrent runs")->check(CLI::PositiveNumber);

  auto* presets_cmd = app.add_subcommand("presets", "Built-in scenario catalog");
  presets_cmd->require_subcommand(1);
  auto* list_cmd = presets_cmd->add_subcommand("list", "List preset names");
  auto* show_cmd = presets_cmd->add_subcommand("show", "Print a preset as a config document");
  std::string show_name;
  show_cmd->add_option("name", show_name)->required();
  auto* export_cmd = presets_cmd->add_subcommand("export", "Write every preset to DIR/<name>.json");
  std::string export_dir;
  export_cmd->add_option("dir", export_dir)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      const auto m = run_target(target, RunOptions{out_dir, seed});
      report(target, m);
      return exit_code(m.status);
    }
    if (*sweep_cmd) return cmd_sweep(pattern, sweep_out, jobs);
    if (*list_cmd) {
      for (const auto& p : presets()) std::cout << p.name << "  " << p.description << '\n';
      return 0;
    }
    if (*show_cmd) {
      auto cfg = find_preset(show_name);
      if (!cfg) {
        std::cerr << "unknown preset " << show_name << '\n';
        return 2;
      }
      std::cout << serialize_config(*cfg);
      return 0;
    }
    if (*export_cmd) {
      fs::create_directories(export_dir);
      for (const auto& p : presets()) {
        std::ofstream f(fs::path(export_dir) / (p.name + ".json"));
        f << serialize_config(p.config);
        if (!f) {
          std::cerr << "cannot write " << p.name << ".json\n";
          return 4;
        }
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 3;
  }
  return 0;
}
