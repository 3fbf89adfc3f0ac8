#pragma once

#include <array>
#include <span>
#include <vector>

#include "wavemech/grid.hpp"

namespace wavemech {

/// FFTW plans bound to one grid shape. Not copyable; one instance per thread
/// (see `fourier`).
class FourierTransform {
 public:
  explicit FourierTransform(const Grid& grid);
  ~FourierTransform();
  FourierTransform(const FourierTransform&) = delete;
  FourierTransform& operator=(const FourierTransform&) = delete;

  const Grid& grid() const { return grid_; }

  void forward(std::span<const cplx> in, std::span<cplx> out);
  /// Normalized inverse: inverse(forward(f)) == f.
  void inverse(std::span<const cplx> in, std::span<cplx> out);

  /// Angular wavenumbers in FFT order for one axis (length n).
  std::span<const double> wavenumbers(int axis) const { return k_[axis]; }
  std::size_t nyquist_index() const { return grid_.n() / 2; }

 private:
  Grid grid_;
  std::array<std::vector<double>, 2> k_;
  void* buffer_;
  void* forward_plan_;
  void* inverse_plan_;
};

/// Thread-local cached transform for the grid.
FourierTransform& fourier(const Grid& grid);

/// Per-axis increment f(x + L_axis) - f(x) of a field whose non-periodic part is a
/// linear ramp. Only meaningful on periodic grids.
using AxisJumps = std::array<double, 2>;

// Derivative policy: spectral on periodic grids, second-order central differences
// otherwise (one-sided second order at the two edge samples of each line).

std::vector<double> gradient(const Grid& grid, std::span<const double> f, int axis,
                             const AxisJumps& jump = {});
std::array<std::vector<double>, 2> gradients(const Grid& grid, std::span<const double> f,
                                             const AxisJumps& jump = {});
std::vector<double> laplacian(const Grid& grid, std::span<const double> f,
                              const AxisJumps& jump = {});
std::vector<double> divergence(const Grid& grid, const std::array<std::vector<double>, 2>& flux);

std::vector<cplx> gradient(const Grid& grid, std::span<const cplx> psi, int axis);
std::vector<cplx> laplacian(const Grid& grid, std::span<const cplx> psi);

/// Removes the linear ramp described by `jump`, leaving a periodic remainder.
std::vector<double> remove_ramp(const Grid& grid, std::span<const double> f, const AxisJumps& jump);

}  // namespace wavemech
