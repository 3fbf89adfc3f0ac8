#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wavemech/diagnostics.hpp"
#include "wavemech/dynamics.hpp"

namespace wavemech {

/// Scalar metric over time plus the verdict it implies under `threshold`.
struct ProbeResult {
  std::string name;
  std::vector<double> t;
  std::vector<double> metric;
  double threshold = 0.0;
  std::string verdict;

  double max_metric() const;
  double min_metric() const;
};

/// Throws NodeInSuperposition unless |c1| R1 > |c2| R2 at every sample where
/// c2 psi2 is nonzero, which keeps the phase of the sum smooth.
void check_node_free(const WaveFunction& psi1, const WaveFunction& psi2, cplx c1, cplx c2);

/// D(t) = |U_t(c1 psi1 + c2 psi2) - c1 U_t psi1 - c2 U_t psi2| / |c1 psi1 + c2 psi2|
/// at every snapshot of the chosen evolver. Verdict LINEAR when max D < 1e-6,
/// NONLINEAR when max D > 1e-2, INCONCLUSIVE otherwise.
ProbeResult superposition_violation(const WaveFunction& psi1, const WaveFunction& psi2, cplx c1, cplx c2,
                                    const Potential& v, const PhysicalConstants& c, const EvolverConfig& cfg);

/// Frozen action snapshot driving the amplitude equation.
struct ActionFrame {
  double t;
  std::vector<double> S;
  AxisJumps jump{0.0, 0.0};
};

/// Integrates dR/dt = -(grad R . grad S)/m - R lap S / (2m) through the frames
/// (S linear in time between them). Returns R at every frame time.
std::vector<std::vector<double>> evolve_amplitude(const ScalarField& r, std::span<const ActionFrame> frames,
                                                  const PhysicalConstants& c, double cfl_safety = 0.5);

/// L2 norm of evolved(a Ra + b Rb) - a evolved(Ra) - b evolved(Rb) at each frame.
/// Verdict LINEAR when every value is below 1e-10.
ProbeResult r_linearity_defect(const ScalarField& ra, const ScalarField& rb, double alpha, double beta,
                               std::span<const ActionFrame> frames, const PhysicalConstants& c);

/// The same additivity test on |psi| under the linear Schroedinger evolver, where
/// the quantum potential couples R back into S. Verdict NONLINEAR when the
/// defect exceeds 1e-3 at some snapshot.
ProbeResult r_linearity_contrast(const ScalarField& ra, const ScalarField& rb, double alpha, double beta,
                                 std::span<const double> s0, const AxisJumps& jump, const Potential& v,
                                 const PhysicalConstants& c, const EvolverConfig& cfg);

struct InterferenceReport {
  std::vector<double> excess;  // rho_sum - rho1 - rho2
  double min_excess = 0.0;
  double visibility = 0.0;  // (max - min)/(max + min) of rho_sum in the window
  std::size_t window_samples = 0;
};

/// Classical kind combines the positive amplitudes, rho_sum = (R1 + R2)^2;
/// linear kind combines the wave functions R_k exp(i S_k / hbar). The window
/// holds the samples where rho1 and rho2 both exceed 1% of their maxima.
InterferenceReport interference_excess(const ScalarField& r1, std::span<const double> s1, const ScalarField& r2,
                                       std::span<const double> s2, EvolverKind kind, const PhysicalConstants& c);

/// max(r1, r2) at the interior snapshots against `threshold`.
ProbeResult ehrenfest_probe(std::span<const DiagnosticsRecord> records, const PhysicalConstants& c,
                            double threshold = 1e-3);

/// sigma_x sigma_p at every snapshot. Verdict ABOVE_BOUND when all products are
/// at least (1 - tolerance) hbar/2, BELOW_BOUND otherwise.
ProbeResult uncertainty_probe(std::span<const DiagnosticsRecord> records, const PhysicalConstants& c,
                              double tolerance = 1e-2);

struct IndirectMomentum {
  std::vector<double> estimates;  // one per cycle
  double mean = 0.0;
  double expected = 0.0;  // rho-weighted mean of m * (grad S / m) at t = 0
  double budget = 0.0;    // m sigma_m / (t2 - t1)
};

/// Repeated measure-collapse-evolve-measure cycles on a classical state. Each
/// cycle draws x1 from rho, collapses R there with resolution sigma_m, evolves
/// the collapsed state for `gap`, draws x2 and records m (x2 - x1) / gap.
IndirectMomentum indirect_momentum(const MadelungFields& initial, const Potential& v, const PhysicalConstants& c,
                                   double sigma_m, double gap, std::size_t cycles, std::uint64_t seed,
                                   double dt, double cfl_safety = 0.5);

}  // namespace wavemech
