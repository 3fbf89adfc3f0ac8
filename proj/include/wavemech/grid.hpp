#pragma once

#include <array>
#include <complex>
#include <optional>
#include <cstddef>
#include <span>
#include <vector>

namespace wavemech {

using cplx = std::complex<double>;
using Point = std::array<double, 2>;

enum class Boundary { Periodic, AbsorbingPad };

struct Interval {
  double min = 0.0;
  double max = 1.0;

  double length() const { return max - min; }
  bool operator==(const Interval&) const = default;
};

/// Uniform lattice in one or two dimensions. Sample i on an axis sits at
/// min + i*dx with dx = (max - min)/n; on periodic axes `max` is identified
/// with `min`. Two-dimensional fields are stored row-major with axis 0 (x)
/// as the slow index.
class Grid {
 public:
  Grid(int dim, std::size_t n, std::array<Interval, 2> bounds, Boundary boundary);

  static Grid line(std::size_t n, double xmin, double xmax,
                   Boundary boundary = Boundary::Periodic);
  static Grid square(std::size_t n, Interval x, Interval y,
                     Boundary boundary = Boundary::Periodic);

  int dim() const { return dim_; }
  std::size_t n() const { return n_; }
  std::size_t size() const { return dim_ == 1 ? n_ : n_ * n_; }
  Boundary boundary() const { return boundary_; }
  bool periodic() const { return boundary_ == Boundary::Periodic; }
  /// Periodic with a power-of-two point count: required by the spectral evolvers.
  bool spectral_ready() const;

  const Interval& bounds(int axis) const { return bounds_[axis]; }
  double length(int axis) const { return bounds_[axis].length(); }
  double dx(int axis = 0) const { return bounds_[axis].length() / static_cast<double>(n_); }
  double min_dx() const;
  double cell_volume() const;

  double coord(int axis, std::size_t i) const {
    return bounds_[axis].min + static_cast<double>(i) * dx(axis);
  }
  std::vector<double> coords(int axis) const;
  Point point(std::size_t flat) const;

  std::size_t index(std::size_t i0, std::size_t i1 = 0) const {
    return dim_ == 1 ? i0 : i0 * n_ + i1;
  }
  std::array<std::size_t, 2> unravel(std::size_t flat) const {
    return dim_ == 1 ? std::array<std::size_t, 2>{flat, 0}
                     : std::array<std::size_t, 2>{flat / n_, flat % n_};
  }
  std::size_t stride(int axis) const { return (dim_ == 2 && axis == 0) ? n_ : 1; }

  /// Index of the sample closest to x along `axis`, clamped (or wrapped) into range.
  std::size_t nearest(int axis, double x) const;
  std::size_t nearest_flat(const Point& p) const;

  bool operator==(const Grid&) const = default;

 private:
  int dim_;
  std::size_t n_;
  std::array<Interval, 2> bounds_;
  Boundary boundary_;
};

struct PhysicalConstants {
  double hbar = 1.0;
  double mass = 1.0;

  void validate() const;
  bool operator==(const PhysicalConstants&) const = default;
};

struct ScalarField {
  Grid grid;
  std::vector<double> values;

  explicit ScalarField(Grid g);
  ScalarField(Grid g, std::vector<double> v);

  double integral() const;
  double max() const;
};

struct WaveFunction {
  Grid grid;
  std::vector<cplx> values;

  explicit WaveFunction(Grid g);
  WaveFunction(Grid g, std::vector<cplx> v);

  double norm() const;  // integral of |psi|^2
  std::vector<double> density() const;
  bool finite() const;
};

double integrate(const Grid& grid, std::span<const double> f);

/// Multilinear interpolation weights (2 samples in 1D, 4 in 2D). Empty when the
/// point lies outside a non-periodic grid.
struct Stencil {
  std::array<std::size_t, 4> index{};
  std::array<double, 4> weight{};
  int count = 0;
};
std::optional<Stencil> interpolation_stencil(const Grid& grid, const Point& p);

/// Throws LeftDomain outside a non-periodic grid.
double interpolate(const Grid& grid, std::span<const double> f, const Point& p);

}  // namespace wavemech
