#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "wavemech/fields.hpp"
#include "wavemech/potential.hpp"

namespace wavemech {

/// One row of the diagnostics time series. Position/momentum moments refer to
/// axis 0; energy and moments are per unit norm.
struct DiagnosticsRecord {
  double t = 0.0;
  double norm = 0.0;
  double energy = 0.0;
  double mean_x = 0.0;
  double mean_p = 0.0;
  double sigma_x = 0.0;
  double sigma_p = 0.0;
  double ehrenfest1 = std::numeric_limits<double>::quiet_NaN();
  double ehrenfest2 = std::numeric_limits<double>::quiet_NaN();
  std::size_t node_count = 0;
  double min_rho = 0.0;
  double mean_force = 0.0;  // <-dV/dx>, kept for the Ehrenfest check
};

/// Moments of a wave function. Momentum statistics come from the spectral
/// representation of p = -i hbar d/dx on periodic grids (finite differences
/// otherwise). `v` adds the potential energy and mean force when given.
DiagnosticsRecord moments(const WaveFunction& psi, const PhysicalConstants& c,
                          const Potential* v = nullptr, double node_eps = kDefaultNodeEps);

/// Moments of a Madelung state. Momentum statistics are the rho-weighted mean
/// and standard deviation of dS/dx.
DiagnosticsRecord moments(const MadelungFields& fields, const PhysicalConstants& c,
                          const Potential* v = nullptr);

DiagnosticsRecord moments(const State& state, const PhysicalConstants& c, const Potential* v = nullptr);

struct EhrenfestSeries {
  std::vector<double> t;
  std::vector<double> r1;  // |d<x>/dt - <p>/m|
  std::vector<double> r2;  // |m d2<x>/dt2 - <-dV/dx>|
  double max_r1() const;
  double max_r2() const;
};

/// Centered differences over interior snapshots. Records must be uniformly
/// spaced in time and carry `mean_force`.
EhrenfestSeries ehrenfest_residuals(std::span<const DiagnosticsRecord> records, const PhysicalConstants& c);

/// Same check, recomputing the mean force from the stored states.
EhrenfestSeries ehrenfest_residuals(std::span<const DiagnosticsRecord> records, const Potential& v,
                                    std::span<const State> states, const PhysicalConstants& c);

/// Writes r1/r2 into the interior records (the two endpoints stay NaN).
void attach_ehrenfest(std::vector<DiagnosticsRecord>& records, const PhysicalConstants& c);

}  // namespace wavemech
