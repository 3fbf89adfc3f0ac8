#include "wavemech/potential.hpp"

#include <algorithm>
#include <cmath>

#include "wavemech/error.hpp"

namespace wavemech {

namespace {

// Central differences with wrap on periodic grids, one-sided second order at edges otherwise.
std::vector<double> table_force(const ScalarField& v, int axis) {
  const Grid& g = v.grid;
  const std::size_t n = g.n();
  const double h2 = 2.0 * g.dx(axis);
  std::vector<double> out(v.values.size());
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    const auto idx = g.unravel(flat);
    const std::size_t i = idx[axis];
    auto at = [&](std::size_t j) {
      auto k = idx;
      k[axis] = j;
      return v.values[g.index(k[0], k[1])];
    };
    double d;
    if (g.periodic()) {
      d = (at((i + 1) % n) - at((i + n - 1) % n)) / h2;
    } else if (i == 0) {
      d = (-3.0 * at(0) + 4.0 * at(1) - at(2)) / h2;
    } else if (i == n - 1) {
      d = (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / h2;
    } else {
      d = (at(i + 1) - at(i - 1)) / h2;
    }
    out[flat] = -d;
  }
  return out;
}

}  // namespace

Potential Potential::free() { return Potential(PotentialKind::Free, 0.0); }

Potential Potential::harmonic(double omega) {
  if (!(omega > 0.0)) throw Error(ErrorCode::InvalidArgument, "harmonic omega must be positive");
  return Potential(PotentialKind::Harmonic, omega);
}

Potential Potential::quartic(double lambda) {
  if (!std::isfinite(lambda)) throw Error(ErrorCode::InvalidArgument, "quartic lambda must be finite");
  return Potential(PotentialKind::Quartic, lambda);
}

Potential Potential::linear_tilt(double force) {
  if (!std::isfinite(force)) throw Error(ErrorCode::InvalidArgument, "tilt force must be finite");
  return Potential(PotentialKind::LinearTilt, force);
}

Potential Potential::tabulated(ScalarField values) {
  if (std::any_of(values.values.begin(), values.values.end(),
                  [](double v) { return !std::isfinite(v); })) {
    throw Error(ErrorCode::InvalidArgument, "tabulated potential has non-finite samples");
  }
  Potential p(PotentialKind::Tabulated, 0.0);
  for (int a = 0; a < values.grid.dim(); ++a) p.table_force_[a] = table_force(values, a);
  p.table_ = std::move(values);
  return p;
}

double Potential::value_at(const Point& x, int dim, const PhysicalConstants& c) const {
  const double r2 = x[0] * x[0] + (dim == 2 ? x[1] * x[1] : 0.0);
  switch (kind_) {
    case PotentialKind::Free: return 0.0;
    case PotentialKind::Harmonic: return 0.5 * c.mass * parameter_ * parameter_ * r2;
    case PotentialKind::Quartic: return parameter_ * r2 * r2;
    case PotentialKind::LinearTilt: return parameter_ * x[0];
    case PotentialKind::Tabulated: return interpolate(table_->grid, table_->values, x);
  }
  return 0.0;
}

Point Potential::force_at(const Point& x, int dim, const PhysicalConstants& c) const {
  const double r2 = x[0] * x[0] + (dim == 2 ? x[1] * x[1] : 0.0);
  Point f{0.0, 0.0};
  for (int a = 0; a < dim; ++a) {
    switch (kind_) {
      case PotentialKind::Free: break;
      case PotentialKind::Harmonic: f[a] = -c.mass * parameter_ * parameter_ * x[a]; break;
      case PotentialKind::Quartic: f[a] = -4.0 * parameter_ * r2 * x[a]; break;
      case PotentialKind::LinearTilt: f[a] = a == 0 ? -parameter_ : 0.0; break;
      case PotentialKind::Tabulated:
        f[a] = interpolate(table_->grid, table_force_[a], x);
        break;
    }
  }
  return f;
}

std::vector<double> Potential::values(const Grid& grid, const PhysicalConstants& c) const {
  if (kind_ == PotentialKind::Tabulated && table_->grid == grid) return table_->values;
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = value_at(grid.point(i), grid.dim(), c);
  return v;
}

std::vector<double> Potential::force(const Grid& grid, const PhysicalConstants& c, int axis) const {
  if (kind_ == PotentialKind::Tabulated && table_->grid == grid) return table_force_[axis];
  std::vector<double> f(grid.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = force_at(grid.point(i), grid.dim(), c)[axis];
  return f;
}

AxisJumps Potential::value_jump(const Grid& grid) const {
  if (kind_ == PotentialKind::LinearTilt && grid.periodic()) {
    return {parameter_ * grid.length(0), 0.0};
  }
  return {0.0, 0.0};
}

double Potential::max_abs(const Grid& grid, const PhysicalConstants& c) const {
  double m = 0.0;
  for (double v : values(grid, c)) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace wavemech
