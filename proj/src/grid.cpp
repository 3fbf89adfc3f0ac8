#include "wavemech/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wavemech/error.hpp"

namespace wavemech {

Grid::Grid(int dim, std::size_t n, std::array<Interval, 2> bounds, Boundary boundary)
    : dim_(dim), n_(n), bounds_(bounds), boundary_(boundary) {
  if (dim != 1 && dim != 2) {
    throw Error(ErrorCode::InvalidArgument, "grid dimension must be 1 or 2");
  }
  if (n < 8) {
    throw Error(ErrorCode::InvalidArgument, "grid needs at least 8 points per axis");
  }
  if (dim == 1) bounds_[1] = Interval{0.0, 1.0};
  for (int a = 0; a < dim; ++a) {
    if (!(bounds_[a].max > bounds_[a].min) || !std::isfinite(bounds_[a].length())) {
      throw Error(ErrorCode::InvalidArgument, "grid bounds must satisfy min < max");
    }
  }
}

Grid Grid::line(std::size_t n, double xmin, double xmax, Boundary boundary) {
  return Grid(1, n, {Interval{xmin, xmax}, Interval{0.0, 1.0}}, boundary);
}

Grid Grid::square(std::size_t n, Interval x, Interval y, Boundary boundary) {
  return Grid(2, n, {x, y}, boundary);
}

bool Grid::spectral_ready() const {
  return periodic() && (n_ & (n_ - 1)) == 0;
}

double Grid::min_dx() const {
  return dim_ == 1 ? dx(0) : std::min(dx(0), dx(1));
}

double Grid::cell_volume() const {
  return dim_ == 1 ? dx(0) : dx(0) * dx(1);
}

std::vector<double> Grid::coords(int axis) const {
  std::vector<double> x(n_);
  for (std::size_t i = 0; i < n_; ++i) x[i] = coord(axis, i);
  return x;
}

Point Grid::point(std::size_t flat) const {
  const auto idx = unravel(flat);
  return {coord(0, idx[0]), dim_ == 2 ? coord(1, idx[1]) : 0.0};
}

std::size_t Grid::nearest(int axis, double x) const {
  const double u = (x - bounds_[axis].min) / dx(axis);
  auto i = static_cast<long long>(std::llround(u));
  const auto n = static_cast<long long>(n_);
  if (periodic()) {
    i %= n;
    if (i < 0) i += n;
  } else {
    i = std::clamp(i, 0LL, n - 1);
  }
  return static_cast<std::size_t>(i);
}

std::size_t Grid::nearest_flat(const Point& p) const {
  return dim_ == 1 ? nearest(0, p[0]) : index(nearest(0, p[0]), nearest(1, p[1]));
}

void PhysicalConstants::validate() const {
  if (!(hbar > 0.0) || !std::isfinite(hbar)) {
    throw Error(ErrorCode::InvalidArgument, "hbar must be positive");
  }
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw Error(ErrorCode::InvalidArgument, "mass must be positive");
  }
}

ScalarField::ScalarField(Grid g) : grid(std::move(g)), values(grid.size(), 0.0) {}

ScalarField::ScalarField(Grid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid.size()) {
    throw Error(ErrorCode::InvalidArgument, "scalar field size does not match grid");
  }
}

double ScalarField::integral() const { return integrate(grid, values); }

double ScalarField::max() const {
  return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

WaveFunction::WaveFunction(Grid g) : grid(std::move(g)), values(grid.size(), cplx{}) {}

WaveFunction::WaveFunction(Grid g, std::vector<cplx> v) : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid.size()) {
    throw Error(ErrorCode::InvalidArgument, "wave function size does not match grid");
  }
}

double WaveFunction::norm() const {
  double s = 0.0;
  for (const auto& z : values) s += std::norm(z);
  return s * grid.cell_volume();
}

std::vector<double> WaveFunction::density() const {
  std::vector<double> rho(values.size());
  std::transform(values.begin(), values.end(), rho.begin(),
                 [](const cplx& z) { return std::norm(z); });
  return rho;
}

bool WaveFunction::finite() const {
  return std::all_of(values.begin(), values.end(), [](const cplx& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

double integrate(const Grid& grid, std::span<const double> f) {
  return std::accumulate(f.begin(), f.end(), 0.0) * grid.cell_volume();
}

std::optional<Stencil> interpolation_stencil(const Grid& grid, const Point& p) {
  std::array<std::size_t, 2> lo{0, 0};
  std::array<std::size_t, 2> hi{0, 0};
  std::array<double, 2> frac{0.0, 0.0};
  const std::size_t n = grid.n();
  for (int a = 0; a < grid.dim(); ++a) {
    const double u = (p[a] - grid.bounds(a).min) / grid.dx(a);
    if (!std::isfinite(u)) return std::nullopt;
    double cell = std::floor(u);
    frac[a] = u - cell;
    if (grid.periodic()) {
      const auto nn = static_cast<double>(n);
      cell = std::fmod(cell, nn);
      if (cell < 0) cell += nn;
      lo[a] = static_cast<std::size_t>(cell);
      hi[a] = (lo[a] + 1) % n;
    } else {
      if (u < 0.0 || u > static_cast<double>(n - 1)) return std::nullopt;
      lo[a] = std::min(static_cast<std::size_t>(cell), n - 2);
      frac[a] = u - static_cast<double>(lo[a]);
      hi[a] = lo[a] + 1;
    }
  }
  Stencil s;
  if (grid.dim() == 1) {
    s.index = {lo[0], hi[0], 0, 0};
    s.weight = {1.0 - frac[0], frac[0], 0.0, 0.0};
    s.count = 2;
  } else {
    s.index = {grid.index(lo[0], lo[1]), grid.index(hi[0], lo[1]), grid.index(lo[0], hi[1]),
               grid.index(hi[0], hi[1])};
    s.weight = {(1 - frac[0]) * (1 - frac[1]), frac[0] * (1 - frac[1]), (1 - frac[0]) * frac[1],
                frac[0] * frac[1]};
    s.count = 4;
  }
  return s;
}

double interpolate(const Grid& grid, std::span<const double> f, const Point& p) {
  const auto s = interpolation_stencil(grid, p);
  if (!s) throw Error(ErrorCode::LeftDomain, "point outside the grid");
  double v = 0.0;
  for (int k = 0; k < s->count; ++k) v += s->weight[k] * f[s->index[k]];
  return v;
}

}  // namespace wavemech
