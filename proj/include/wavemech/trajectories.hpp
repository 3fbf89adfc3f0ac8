#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "wavemech/fields.hpp"
#include "wavemech/potential.hpp"

namespace wavemech {

/// Uniform double in [0, 1) from the top 53 bits of one 64-bit draw. Spelled
/// out so that ensembles are identical across standard library implementations.
double uniform01(std::mt19937_64& rng);

struct TrajectoryEnsemble {
  int dim = 1;
  std::vector<Point> positions;
  std::vector<Point> velocities;
  std::vector<std::uint8_t> valid;
  std::uint64_t seed = 0;
  double t = 0.0;

  std::size_t count() const { return positions.size(); }
  std::size_t valid_count() const;
};

/// Draws positions from a sampled density. Between samples the density is the
/// multilinear interpolant of the grid values: 1D uses the exact inverse CDF of
/// that piecewise-linear density, 2D picks a cell by mass and then rejection
/// samples the bilinear patch.
class DensitySampler {
 public:
  explicit DensitySampler(const ScalarField& rho);

  Point draw(std::mt19937_64& rng) const;

 private:
  Grid grid_;
  std::vector<double> rho_;
  std::vector<double> cdf_;  // cumulative cell mass, last entry is the total
  std::size_t cells_per_axis_;

  std::array<std::size_t, 4> corners(std::size_t cell) const;
};

TrajectoryEnsemble sample_ensemble(const ScalarField& rho, std::size_t count, std::uint64_t seed);

/// Gradient of S on the grid divided by m, ready for interpolation.
class VelocityField {
 public:
  VelocityField(const MadelungFields& fields, const PhysicalConstants& c);

  const Grid& grid() const { return grid_; }
  /// Throws NodeRegion when the stencil touches a node sample, LeftDomain
  /// outside a non-periodic grid.
  Point at(const Point& x) const;

 private:
  Grid grid_;
  std::array<std::vector<double>, 2> v_;
  std::vector<std::uint8_t> node_;
};

Point bohmian_velocity(const MadelungFields& fields, const PhysicalConstants& c, const Point& x);

struct FieldFrame {
  double t;
  VelocityField velocity;
};

/// RK4 on dx/dt = v(x, t) from ensemble.t to frames.back().t with step `dt`,
/// linear in time between bracketing frames. Particles whose stencil touches a
/// node are marked invalid and left in place; leaving a non-periodic grid
/// throws LeftDomain. Positions on periodic grids are kept unwrapped.
TrajectoryEnsemble advance(const TrajectoryEnsemble& ensemble, std::span<const FieldFrame> frames, double dt);

struct NewtonianTrajectory {
  std::vector<double> t;
  std::vector<Point> x;
  std::vector<Point> p;

  double energy(std::size_t i, const Potential& v, int dim, const PhysicalConstants& c) const;
};

/// Hamilton's equations dx/dt = p/m, dp/dt = -grad V integrated by RK4.
NewtonianTrajectory newtonian_oracle(const Point& x0, const Point& p0, const Potential& v,
                                     const PhysicalConstants& c, int dim, double dt, double t_end);

/// Location of the density maximum, refined by a parabola through the peak
/// sample and its axis neighbours.
Point crest_position(const ScalarField& rho);

/// Kolmogorov-Smirnov distance between 1D samples and the CDF of the
/// piecewise-linear density (positions are wrapped onto periodic grids).
double ks_statistic(std::span<const double> samples, const ScalarField& rho);

}  // namespace wavemech
