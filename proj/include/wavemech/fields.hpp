#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "wavemech/grid.hpp"
#include "wavemech/spectral.hpp"

namespace wavemech {

inline constexpr double kDefaultNodeEps = 1e-10;
inline constexpr double kDefaultRegEps = 1e-12;

/// Polar (amplitude, action) representation psi = R exp(iS/hbar).
///
/// S is stored unwrapped. On periodic axes `action_jump[a]` records
/// S(x + L_a) - S(x), so the field S - jump*(x - xmin)/L is periodic and the
/// spectral derivative policy applies to it. Node-flagged samples carry an S
/// value continued from a neighbour rather than taken from data.
struct MadelungFields {
  Grid grid;
  std::vector<double> R;
  std::vector<double> S;
  std::vector<std::uint8_t> node;
  AxisJumps action_jump{0.0, 0.0};

  explicit MadelungFields(Grid g);
  MadelungFields(Grid g, std::vector<double> r, std::vector<double> s, AxisJumps jump = {});

  std::vector<double> rho() const;
  ScalarField density() const { return ScalarField(grid, rho()); }
  ScalarField amplitude() const { return ScalarField(grid, R); }
  std::size_t node_count() const;
  bool finite() const;
};

/// Either representation of a simulation state: linear runs carry psi, classical
/// runs carry (R, S).
using State = std::variant<WaveFunction, MadelungFields>;

const Grid& grid_of(const State& state);

MadelungFields decompose(const WaveFunction& psi, const PhysicalConstants& c,
                         double node_eps = kDefaultNodeEps);

WaveFunction recompose(const MadelungFields& fields, const PhysicalConstants& c);

struct QuantumPotential {
  ScalarField Q;
  std::vector<std::uint8_t> regularized;  // samples where R < reg_eps * max R (Q set to 0)
  std::size_t regularized_count = 0;
};

/// Q = -(hbar^2/2m) lap(R)/R.
QuantumPotential quantum_potential(const ScalarField& R, const PhysicalConstants& c,
                                   double reg_eps = kDefaultRegEps);

struct Winding {
  long n = 0;
  double circulation = 0.0;  // sum of branch-adjusted S differences around the loop
  double residual = 0.0;     // |circulation/(2 pi hbar) - n|
};

/// `loop` is an ordered cycle of flat sample indices; the closing edge from the
/// last sample back to the first is implied.
Winding winding_circulation(const MadelungFields& fields, std::span<const std::size_t> loop,
                            const PhysicalConstants& c);

/// Counter-clockwise cycle of samples approximating a circle; consecutive
/// duplicates removed.
std::vector<std::size_t> circular_loop(const Grid& grid, Point center, double radius);

/// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

}  // namespace wavemech
