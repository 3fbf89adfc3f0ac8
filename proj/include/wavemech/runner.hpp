#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wavemech/config.hpp"
#include "wavemech/dynamics.hpp"
#include "wavemech/probes.hpp"
#include "wavemech/trajectories.hpp"

namespace wavemech {

std::string_view version();

enum class RunStatus { Completed, Caustic, Blowup, Failed, ConfigError, IoError };

std::string_view to_string(RunStatus s);
/// 0 completed, 2 config error, 3 numerical failure, 4 I/O error.
int exit_code(RunStatus s);

struct RunOptions {
  std::optional<std::string> out_dir;  // overrides cfg.output_dir
  std::optional<std::uint64_t> seed;   // overrides trajectory and probe seeds
};

struct OutputFile {
  std::string path;  // relative to the output directory
  std::uint64_t bytes = 0;
  std::string sha256;
};

struct RunManifest {
  ExperimentConfig config;  // with overrides applied
  std::string version;
  std::string started;
  std::string finished;
  RunStatus status = RunStatus::Completed;
  std::string message;
  std::optional<CausticReport> caustic;
  std::string out_dir;
  std::vector<OutputFile> files;
};

/// Everything a run produced, before it is written to disk.
struct RunData {
  std::vector<DiagnosticsRecord> records;  // at snapshot times
  std::vector<State> snapshots;
  std::vector<TrajectoryEnsemble> ensembles;  // at snapshot times
  std::vector<ProbeResult> probes;
};

/// Evolves, advances trajectories, runs the requested probes and writes every
/// output plus manifest.json. Never throws for run failures; the returned
/// manifest (also on disk) carries the status.
RunManifest run(ExperimentConfig cfg, const RunOptions& opts = {});

/// Config-file entry point: parse/validation failures yield a ConfigError manifest
/// written to --out when given.
RunManifest run_file(const std::string& path, const RunOptions& opts = {});

/// Writes the data files into `dir` and appends them to `files`. Throws
/// Error(IoError) when a file cannot be written.
void emit_outputs(const ExperimentConfig& cfg, const Potential& v, const RunData& data, const std::string& dir,
                  std::vector<OutputFile>& files);

void write_manifest(const RunManifest& m, const std::string& dir);

std::string sha256_file(const std::string& path);

}  // namespace wavemech
