#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wavemech/dynamics.hpp"
#include "wavemech/error.hpp"
#include "wavemech/potential.hpp"
#include "wavemech/states.hpp"

namespace wavemech {

struct GridSpec {
  int dim = 1;
  std::size_t n = 1024;
  std::array<Interval, 2> bounds{Interval{-10.0, 10.0}, Interval{-10.0, 10.0}};
  Boundary boundary = Boundary::Periodic;

  Grid build() const;
  bool operator==(const GridSpec&) const = default;
};

struct PotentialSpec {
  PotentialKind kind = PotentialKind::Free;
  double omega = 1.0;   // harmonic
  double lambda = 0.0;  // quartic
  double force = 0.0;   // linear tilt
  std::string file;     // tabulated

  bool operator==(const PotentialSpec&) const = default;
};

enum class InitialKind { Gaussian, TwoGaussian, Vortex, Tabulated };

struct InitialStateSpec {
  InitialKind kind = InitialKind::Gaussian;
  GaussianPacket first;
  GaussianPacket second;  // two-gaussian only
  cplx c1{1.0, 0.0};
  cplx c2{1.0, 0.0};
  int winding = 1;  // vortex
  double r0 = 1.0;
  Point center{0.0, 0.0};
  std::string file;  // tabulated

  bool operator==(const InitialStateSpec&) const = default;
};

struct EvolverSpec {
  EvolverKind kind = EvolverKind::Linear;
  double cfl_safety = 0.5;
  double caustic_threshold = kDefaultCausticThreshold;

  bool operator==(const EvolverSpec&) const = default;
};

struct TimeSpec {
  double dt = 0.01;
  double t_end = 1.0;
  std::size_t snapshot_stride = 1;

  bool operator==(const TimeSpec&) const = default;
};

struct TrajectorySpec {
  std::size_t count = 100;
  std::uint64_t seed = 1;

  bool operator==(const TrajectorySpec&) const = default;
};

struct ProbeSpec {
  std::string name;
  std::optional<double> threshold;
  std::map<std::string, double> params;

  double param(const std::string& key, double fallback) const;
  bool operator==(const ProbeSpec&) const = default;
};

struct ExperimentConfig {
  std::string scenario;
  std::string description;
  GridSpec grid;
  PhysicalConstants physics;
  PotentialSpec potential;
  InitialStateSpec initial_state;
  EvolverSpec evolver;
  TimeSpec time;
  std::optional<TrajectorySpec> trajectories;
  std::vector<ProbeSpec> probes;
  std::string output_dir;
  bool write_fields = true;

  /// Directory that relative file references resolve against. Not serialized.
  std::string base_dir = ".";

  EvolverConfig evolver_config() const;
  std::string resolve(const std::string& path) const;

  bool operator==(const ExperimentConfig& o) const;
};

/// Thrown for malformed documents (ParseError) and for invalid content
/// (ValidationError). `issues` lists every problem as "path: message".
class ConfigError : public Error {
 public:
  ConfigError(ErrorCode code, std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

/// Probe names understood by the runner.
const std::vector<std::string>& known_probes();

ExperimentConfig parse_config(std::string_view text, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);

/// All validation problems of an already-built config (empty when valid).
std::vector<std::string> validation_issues(const ExperimentConfig& cfg);
void validate(const ExperimentConfig& cfg);

/// Builders shared by the runner and the tests.
Potential build_potential(const ExperimentConfig& cfg, const Grid& grid);
State build_initial_state(const ExperimentConfig& cfg, const Grid& grid);
/// The two normalized components of a two-gaussian initial state.
std::pair<WaveFunction, WaveFunction> build_components(const ExperimentConfig& cfg, const Grid& grid);

}  // namespace wavemech
