#include "wavemech/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "wavemech/error.hpp"
#include "wavemech/trajectories.hpp"

namespace wavemech {

MadelungFields collapse_position(const MadelungFields& fields, const Point& x_m, double sigma_m) {
  const Grid& g = fields.grid;
  if (!(sigma_m >= 2.0 * g.min_dx() * (1.0 - 1e-12))) {
    throw Error(ErrorCode::InvalidArgument, "collapse width must be at least 2 dx");
  }
  const auto rho = fields.rho();
  const auto at = interpolation_stencil(g, x_m);
  if (!at) throw Error(ErrorCode::LeftDomain, "measurement position outside the grid");
  double rho_m = 0.0;
  for (int k = 0; k < at->count; ++k) rho_m += at->weight[k] * rho[at->index[k]];
  if (!(rho_m > 0.0)) throw Error(ErrorCode::ZeroOverlap, "density vanishes at the measurement position");

  MadelungFields out = fields;
  const double inv = 1.0 / (4.0 * sigma_m * sigma_m);
  for (std::size_t i = 0; i < out.R.size(); ++i) {
    const Point p = g.point(i);
    double r2 = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      double d = p[a] - x_m[a];
      if (g.periodic()) d = std::remainder(d, g.length(a));
      r2 += d * d;
    }
    out.R[i] = fields.R[i] * std::exp(-r2 * inv);
  }
  double norm = 0.0;
  for (double r : out.R) norm += r * r;
  norm *= g.cell_volume();
  if (!(norm > std::numeric_limits<double>::min())) {
    throw Error(ErrorCode::ZeroOverlap, "windowed norm underflows");
  }
  const double scale = 1.0 / std::sqrt(norm);
  for (double& r : out.R) r *= scale;
  return out;
}

Point sample_measurement(const ScalarField& rho, std::uint64_t seed) {
  const DensitySampler sampler(rho);
  std::mt19937_64 rng(seed);
  return sampler.draw(rng);
}

double momentum_from_positions(double x1, double t1, double x2, double t2, const PhysicalConstants& c) {
  c.validate();
  if (t2 == t1) throw Error(ErrorCode::DegenerateInterval, "t2 equals t1");
  if (t2 < t1) throw Error(ErrorCode::InvalidArgument, "t2 must follow t1");
  return c.mass * (x2 - x1) / (t2 - t1);
}

namespace {

void check_shapes(const PositiveBasis& basis, const Grid* grid) {
  if (basis.states.empty()) throw Error(ErrorCode::InvalidArgument, "basis is empty");
  if (basis.states.size() != basis.weights.size()) {
    throw Error(ErrorCode::InvalidArgument, "one weight per basis state required");
  }
  for (const auto& s : basis.states) {
    if (!(s.grid == basis.states.front().grid) || (grid != nullptr && !(s.grid == *grid))) {
      throw Error(ErrorCode::InvalidArgument, "basis states must share the observable's grid");
    }
  }
}

}  // namespace

void validate_basis(const PositiveBasis& basis) {
  check_shapes(basis, nullptr);
  double wsum = 0.0;
  for (double w : basis.weights) {
    if (!(w >= 0.0)) throw Error(ErrorCode::BasisViolation, "negative weight");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-12) throw Error(ErrorCode::BasisViolation, "weights do not sum to 1");
  for (std::size_t i = 0; i < basis.states.size(); ++i) {
    const auto& r = basis.states[i].values;
    if (std::any_of(r.begin(), r.end(), [](double v) { return !(v >= 0.0); })) {
      throw Error(ErrorCode::BasisViolation, "state " + std::to_string(i) + " has a negative sample");
    }
    double n2 = 0.0;
    for (double v : r) n2 += v * v;
    n2 *= basis.states[i].grid.cell_volume();
    if (std::abs(n2 - 1.0) > 1e-10) {
      throw Error(ErrorCode::BasisViolation, "state " + std::to_string(i) + " is not normalized");
    }
  }
  for (std::size_t i = 0; i < basis.states.size(); ++i) {
    for (std::size_t j = i + 1; j < basis.states.size(); ++j) {
      const auto& a = basis.states[i].values;
      const auto& b = basis.states[j].values;
      for (std::size_t k = 0; k < a.size(); ++k) {
        if (std::min(a[k], b[k]) != 0.0) {
          throw Error(ErrorCode::BasisViolation,
                      "states " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
        }
      }
    }
  }
}

PureMixed pure_vs_mixed_unchecked(const PositiveBasis& basis, const ScalarField& a) {
  check_shapes(basis, &a.grid);
  const std::size_t m = basis.states.size();
  const double dv = a.grid.cell_volume();
  auto overlap = [&](std::size_t i, std::size_t j) {
    const auto& ri = basis.states[i].values;
    const auto& rj = basis.states[j].values;
    double s = 0.0;
    for (std::size_t k = 0; k < ri.size(); ++k) s += ri[k] * rj[k] * a.values[k];
    return s * dv;
  };
  PureMixed out;
  for (std::size_t i = 0; i < m; ++i) {
    out.mixed += basis.weights[i] * overlap(i, i);
    for (std::size_t j = 0; j < m; ++j) {
      if (i != j) out.difference += std::sqrt(basis.weights[i] * basis.weights[j]) * overlap(i, j);
    }
  }
  std::vector<double> pure(a.values.size(), 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double s = std::sqrt(basis.weights[i]);
    for (std::size_t k = 0; k < pure.size(); ++k) pure[k] += s * basis.states[i].values[k];
  }
  for (std::size_t k = 0; k < pure.size(); ++k) out.pure += pure[k] * pure[k] * a.values[k];
  out.pure *= dv;
  return out;
}

PureMixed pure_vs_mixed_expectation(const PositiveBasis& basis, const ScalarField& a) {
  validate_basis(basis);
  return pure_vs_mixed_unchecked(basis, a);
}

ExchangeTerm exchange_term_max(const ScalarField& r1, const ScalarField& r2, bool with_field) {
  if (!(r1.grid == r2.grid)) throw Error(ErrorCode::InvalidArgument, "fields must share a grid");
  if (r1.grid.dim() != 1) throw Error(ErrorCode::InvalidArgument, "exchange term needs 1D fields");
  std::vector<double> g(r1.values.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = r1.values[i] * r2.values[i];
  ExchangeTerm out;
  double gmax = 0.0;
  double gmin = 0.0;
  for (double v : g) {
    gmax = std::max(gmax, v);
    gmin = std::min(gmin, v);
  }
  // For signed inputs the largest product can pair the two most negative values.
  out.max = 2.0 * std::max(gmax * gmax, gmin * gmin);
  if (with_field) {
    const std::size_t n = g.size();
    std::vector<double> f(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) f[i * n + j] = 2.0 * g[i] * g[j];
    }
    out.field = std::move(f);
  }
  return out;
}

}  // namespace wavemech
