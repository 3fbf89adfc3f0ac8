#pragma once

#include <optional>
#include <vector>

#include "wavemech/grid.hpp"
#include "wavemech/spectral.hpp"

namespace wavemech {

enum class PotentialKind { Free, Harmonic, Quartic, LinearTilt, Tabulated };

/// External potential V and its force -grad V.
///
///   harmonic:    V = m w^2 |x|^2 / 2
///   quartic:     V = lambda |x|^4
///   linear tilt: V = F x  (along axis 0)
///   tabulated:   samples on a fixed grid; force by central differences,
///                off-grid values by multilinear interpolation
class Potential {
 public:
  static Potential free();
  static Potential harmonic(double omega);
  static Potential quartic(double lambda);
  static Potential linear_tilt(double force);
  static Potential tabulated(ScalarField values);

  PotentialKind kind() const { return kind_; }
  double parameter() const { return parameter_; }

  std::vector<double> values(const Grid& grid, const PhysicalConstants& c) const;
  std::vector<double> force(const Grid& grid, const PhysicalConstants& c, int axis) const;

  double value_at(const Point& x, int dim, const PhysicalConstants& c) const;
  Point force_at(const Point& x, int dim, const PhysicalConstants& c) const;

  /// V(x + L_a) - V(x) on periodic axes; nonzero only for the linear tilt.
  AxisJumps value_jump(const Grid& grid) const;

  /// Largest |V| on the grid.
  double max_abs(const Grid& grid, const PhysicalConstants& c) const;

 private:
  Potential(PotentialKind kind, double parameter) : kind_(kind), parameter_(parameter) {}

  PotentialKind kind_;
  double parameter_;
  std::optional<ScalarField> table_;
  std::array<std::vector<double>, 2> table_force_;
};

}  // namespace wavemech
