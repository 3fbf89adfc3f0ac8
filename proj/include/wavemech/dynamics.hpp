#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "wavemech/diagnostics.hpp"
#include "wavemech/error.hpp"
#include "wavemech/fields.hpp"
#include "wavemech/potential.hpp"

namespace wavemech {

inline constexpr double kDefaultCausticThreshold = 0.1;
inline constexpr double kNegativeRhoCaustic = 1e-8;   // relative; a missed caustic

enum class EvolverKind { Linear, Classical };

struct EvolverConfig {
  EvolverKind kind = EvolverKind::Linear;
  double dt = 0.01;           // nominal step; snapshots fall on multiples of it
  double cfl_safety = 0.5;    // in (0, 1]
  double caustic_threshold = kDefaultCausticThreshold;
  double t_end = 1.0;
  std::size_t snapshot_stride = 1;

  void validate() const;
};

enum class CausticMetric { Compression, NegativeDensity };

struct CausticReport {
  double time = std::numeric_limits<double>::quiet_NaN();
  CausticMetric metric = CausticMetric::Compression;
  double value = 0.0;  // max|lap S| dt/m, or min rho / max rho
  Point location{0.0, 0.0};
};

class CausticError : public Error {
 public:
  explicit CausticError(CausticReport report);
  const CausticReport& report() const { return report_; }

 private:
  CausticReport report_;
};

/// Strang split step: half kick, spectral drift, half kick. Periodic
/// power-of-two grids only.
class LinearPropagator {
 public:
  LinearPropagator(const Grid& grid, const Potential& v, const PhysicalConstants& c, double dt);

  void step(std::vector<cplx>& psi) const;
  double dt() const { return dt_; }

 private:
  Grid grid_;
  double dt_;
  std::vector<cplx> half_kick_;
  std::vector<cplx> drift_;
};

WaveFunction step_linear(const WaveFunction& psi, const Potential& v, const PhysicalConstants& c, double dt);

struct ClassicalStepStats {
  double raw_min_rho = 0.0;  // before clamping
  double max_rho = 0.0;
};

/// One RK4 step of the coupled Hamilton-Jacobi / continuity system
///   dS/dt = -(|grad S|^2/2m + V),   d(rho)/dt = -div(rho grad S / m).
/// Checks the compression metric at `caustic_threshold` before stepping and the
/// negative-density criterion afterwards.
MadelungFields step_classical(const MadelungFields& fields, const Potential& v, const PhysicalConstants& c,
                              double dt, double caustic_threshold = kDefaultCausticThreshold,
                              ClassicalStepStats* stats = nullptr);

/// Reports when max |lap S| dt/m over non-node samples exceeds theta, or when
/// `raw_rho` (if given) dips below -1e-8 max rho.
std::optional<CausticReport> detect_caustic(const MadelungFields& fields, const PhysicalConstants& c,
                                            double dt, double theta, std::span<const double> raw_rho = {});

/// Largest stable step: safety * dx / max(|grad S|/m, hbar/(m dx)); the linear
/// evolver also keeps dt max|V|/hbar below 0.5.
double cfl_limit(const State& state, const Potential& v, const PhysicalConstants& c, double safety);

/// Cosine taper applied to the outer pad of an absorbing-pad grid.
void apply_absorbing_taper(const Grid& grid, std::vector<double>& rho);

struct Snapshot {
  std::size_t index;  // snapshot ordinal
  std::size_t step;   // nominal step count
  double t;
  const State& state;
  const DiagnosticsRecord& record;
};

using Observer = std::function<void(const Snapshot&)>;

struct EvolveResult {
  State final_state;
  double t_final = 0.0;
  std::vector<DiagnosticsRecord> records;
  std::size_t substeps = 0;
};

/// Advances `initial` to cfg.t_end in equal nominal steps of at most cfg.dt, each split
/// into equal substeps that respect `cfl_limit`. Observers run at t = 0, every
/// snapshot_stride nominal steps and at the final time. Step errors propagate
/// with the failure time attached.
EvolveResult evolve(State initial, const Potential& v, const PhysicalConstants& c, const EvolverConfig& cfg,
                    std::span<const Observer> observers = {});

}  // namespace wavemech
