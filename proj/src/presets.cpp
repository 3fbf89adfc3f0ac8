#include "wavemech/presets.hpp"

#include <cmath>
#include <numbers>

namespace wavemech {

namespace {

GridSpec line(std::size_t n, double lo, double hi, Boundary b) {
  GridSpec g;
  g.dim = 1;
  g.n = n;
  g.bounds = {Interval{lo, hi}, Interval{lo, hi}};
  g.boundary = b;
  return g;
}

GaussianPacket packet(double x0, double sigma, double p0, double chirp = 0.0) {
  GaussianPacket p;
  p.center = {x0, 0.0};
  p.sigma = sigma;
  p.momentum = {p0, 0.0};
  p.chirp = chirp;
  return p;
}

ExperimentConfig base(const std::string& name, const std::string& description) {
  ExperimentConfig c;
  c.scenario = name;
  c.description = description;
  c.output_dir = "out/" + name;
  return c;
}

ProbeSpec probe(const std::string& name, std::map<std::string, double> params = {},
                std::optional<double> threshold = std::nullopt) {
  return ProbeSpec{name, threshold, std::move(params)};
}

std::vector<Preset> build() {
  std::vector<Preset> out;
  auto add = [&](ExperimentConfig c) { out.push_back({c.scenario, c.description, std::move(c)}); };
  constexpr double pi = std::numbers::pi;

  {
    auto c = base("dispersion", "Linear free Gaussian, sigma0 = 0.1: width follows the spreading law");
    // The packet reaches sigma = 10 by t = 2; the box keeps its tails off the periodic seam.
    c.grid = line(8192, -102.4, 102.4, Boundary::Periodic);
    c.initial_state.first = packet(0.0, 0.1, 1.0);
    c.evolver.kind = EvolverKind::Linear;
    c.time = {0.01, 2.0, 10};
    c.probes = {probe("ehrenfest"), probe("uncertainty")};
    add(c);
  }
  {
    auto c = base("soliton_stability", "Classical free Gaussian with S = p x: rigid translation, constant width");
    // Same packet as `dispersion`; the packet does not spread, so half the box suffices.
    c.grid = line(2048, -25.6, 25.6, Boundary::Periodic);
    c.initial_state.first = packet(0.0, 0.1, 1.0);
    c.evolver.kind = EvolverKind::Classical;
    c.time = {0.01, 2.0, 10};
    c.probes = {probe("uncertainty")};
    add(c);
  }
  {
    auto c = base("harmonic_ehrenfest", "Linear coherent state in a harmonic well over one period");
    c.grid = line(1024, -16.0, 16.0, Boundary::Periodic);
    c.potential.kind = PotentialKind::Harmonic;
    c.potential.omega = 1.0;
    c.initial_state.first = packet(2.0, std::sqrt(0.5), 0.0);
    c.evolver.kind = EvolverKind::Linear;
    c.time = {0.01, 2.0 * pi, 10};
    c.probes = {probe("ehrenfest"), probe("uncertainty")};
    add(c);
  }
  {
    auto c = base("harmonic_ehrenfest_classical",
                  "Classical displaced packet in a harmonic well, stopped before the quarter-period caustic");
    c.grid = line(1024, -8.0, 8.0, Boundary::AbsorbingPad);
    c.potential.kind = PotentialKind::Harmonic;
    c.potential.omega = 1.0;
    c.initial_state.first = packet(2.0, std::sqrt(0.5), 0.0);
    c.evolver.kind = EvolverKind::Classical;
    c.time = {0.01, 1.2, 10};
    c.probes = {probe("ehrenfest")};
    add(c);
  }
  {
    auto c = base("bohmian_equivalence",
                  "Classical defocusing packet in a harmonic well with a sampled trajectory ensemble");
    c.grid = line(1024, -8.0, 8.0, Boundary::AbsorbingPad);
    c.potential.kind = PotentialKind::Harmonic;
    c.potential.omega = 1.0;
    c.initial_state.first = packet(0.0, 1.0, 0.0, -1.0);
    c.evolver.kind = EvolverKind::Classical;
    c.time = {0.005, 1.5, 30};
    c.trajectories = TrajectorySpec{1000, 7};
    c.probes = {probe("ehrenfest")};
    add(c);
  }
  {
    auto c = base("focusing_caustic", "Classical focusing flow S0 = -a x^2/2 with a = m = 1: caustic near t = 1");
    c.grid = line(2048, -16.0, 16.0, Boundary::AbsorbingPad);
    c.initial_state.first = packet(0.0, 2.0, 0.0, 1.0);
    c.evolver.kind = EvolverKind::Classical;
    c.time = {0.002, 2.0, 50};
    add(c);
  }
  {
    auto c = base("interference_classical", "Two classical bumps with equal phase: purely constructive excess");
    c.grid = line(1024, -10.0, 10.0, Boundary::AbsorbingPad);
    c.initial_state.kind = InitialKind::TwoGaussian;
    c.initial_state.first = packet(-1.5, 0.6, 0.0);
    c.initial_state.second = packet(1.5, 0.6, 0.0);
    c.evolver.kind = EvolverKind::Classical;
    c.time = {0.01, 0.0, 1};
    c.probes = {probe("interference")};
    add(c);
  }
  {
    auto c = base("interference_linear", "Overlapping linear packets with momentum offset 10 hbar/sigma: fringes");
    c.grid = line(1024, -16.0, 16.0, Boundary::Periodic);
    c.initial_state.kind = InitialKind::TwoGaussian;
    c.initial_state.first = packet(0.0, 1.0, 5.0);
    c.initial_state.second = packet(0.0, 1.0, -5.0);
    c.evolver.kind = EvolverKind::Linear;
    c.time = {0.01, 0.0, 1};
    c.probes = {probe("interference", {}, 0.9)};
    add(c);
  }
  {
    auto c = base("pure_vs_mixed", "Disjoint positive basis: pure and mixed expectations of x and x^2 agree");
    c.grid = line(1024, -10.0, 10.0, Boundary::AbsorbingPad);
    c.initial_state.first = packet(0.0, 1.0, 0.0);
    c.evolver.kind = EvolverKind::Classical;
    c.time = {0.01, 0.0, 1};
    c.probes = {probe("pure_vs_mixed", {{"center1", -3.0}, {"center2", 3.0}, {"half_width", 1.5}, {"w1", 0.5}})};
    add(c);
  }
  {
    auto c = base("exchange_term", "Two-particle exchange term for disjoint bumps and 8-sigma separated Gaussians");
    c.grid = line(1024, -10.0, 10.0, Boundary::AbsorbingPad);
    c.initial_state.first = packet(0.0, 1.0, 0.0);
    c.evolver.kind = EvolverKind::Classical;
    c.time = {0.01, 0.0, 1};
    c.probes = {probe("exchange_term", {{"sigma", 0.5}})};
    add(c);
  }
  {
    auto c = base("winding", "2D vortex with winding 3: circulation quantized in units of 2 pi hbar");
    c.grid.dim = 2;
    c.grid.n = 256;
    c.grid.bounds = {Interval{-8.0, 8.0}, Interval{-8.0, 8.0}};
    c.grid.boundary = Boundary::Periodic;
    c.initial_state.kind = InitialKind::Vortex;
    c.initial_state.winding = 3;
    c.initial_state.r0 = 2.0;
    c.evolver.kind = EvolverKind::Linear;
    c.time = {0.01, 0.0, 1};
    c.probes = {probe("winding")};
    add(c);
  }
  auto superposition = [&](EvolverKind kind, const std::string& name, const std::string& text) {
    auto c = base(name, text);
    c.grid = line(1024, -2.0 * pi, 2.0 * pi, Boundary::Periodic);
    c.physics.mass = 4.0;  // keeps the classical sum free of caustics up to t = 1
    c.initial_state.kind = InitialKind::TwoGaussian;
    c.initial_state.first = packet(0.0, 0.8, 1.0);
    c.initial_state.second = packet(0.0, 0.8, -1.0);
    c.initial_state.c1 = {3.0, 0.0};
    c.initial_state.c2 = {1.0, 0.0};
    c.evolver.kind = kind;
    c.time = {0.01, 1.0, 10};
    c.probes = {probe("superposition_violation")};
    add(c);
  };
  superposition(EvolverKind::Classical, "superposition_probe",
                "Classical evolution of 3 psi1 + psi2 departs from the sum of evolved parts");
  superposition(EvolverKind::Linear, "superposition_probe_linear",
                "Linear evolution of the same superposition: evolved sum equals sum of evolved parts");
  {
    auto c = base("r_linearity", "Amplitude equation with a frozen action is additive; quantum |psi| is not");
    c.grid = line(1024, -8.0, 8.0, Boundary::AbsorbingPad);
    c.potential.kind = PotentialKind::Harmonic;
    c.potential.omega = 1.0;
    c.initial_state.first = packet(0.5, 0.7, 0.5, -0.3);
    c.evolver.kind = EvolverKind::Classical;
    c.time = {0.01, 1.0, 10};
    c.probes = {probe("r_linearity", {{"alpha", 0.7},
                                      {"beta", 1.3},
                                      {"ra_center", -1.0},
                                      {"ra_sigma", 0.8},
                                      {"rb_center", 1.5},
                                      {"rb_sigma", 0.5},
                                      {"contrast", 1.0}})};
    add(c);
  }
  {
    auto c = base("indirect_momentum",
                  "Collapse-evolve-collapse cycles on a uniform drift grad S / m = 3 recover p = 3 m");
    // Wide box: the packet tails must vanish at the periodic seam.
    c.grid = line(512, -32.0, 32.0, Boundary::Periodic);
    c.initial_state.first = packet(0.0, 3.0, 3.0);
    c.evolver.kind = EvolverKind::Classical;
    c.time = {0.05, 1.0, 5};
    c.probes = {probe("indirect_momentum", {{"sigma_m", 0.25}, {"gap", 1.0}, {"cycles", 100.0}})};
    add(c);
  }
  return out;
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> catalog = build();
  return catalog;
}

std::optional<ExperimentConfig> find_preset(const std::string& name) {
  for (const auto& p : presets()) {
    if (p.name == name) return p.config;
  }
  return std::nullopt;
}

}  // namespace wavemech
