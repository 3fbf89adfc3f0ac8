#include "wavemech/trajectories.hpp"

#include <algorithm>
#include <cmath>

#include "wavemech/error.hpp"
#include "wavemech/spectral.hpp"

namespace wavemech {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t TrajectoryEnsemble::valid_count() const {
  return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), std::uint8_t{1}));
}

namespace {

// Position s in [0, 1] inside a cell whose density rises linearly from a to b,
// such that the mass to the left of s is the fraction u of the cell mass.
double invert_linear_cell(double a, double b, double u) {
  const double target = u * 0.5 * (a + b);
  if (target <= 0.0) return 0.0;
  const double s = 2.0 * target / (a + std::sqrt(a * a + 2.0 * (b - a) * target));
  return std::clamp(s, 0.0, 1.0);
}

double cell_partial_mass(double a, double b, double s) {
  return a * s + 0.5 * (b - a) * s * s;
}

}  // namespace

DensitySampler::DensitySampler(const ScalarField& rho)
    : grid_(rho.grid), rho_(rho.values),
      cells_per_axis_(rho.grid.periodic() ? rho.grid.n() : rho.grid.n() - 1) {
  if (std::any_of(rho_.begin(), rho_.end(), [](double r) { return !(r >= 0.0) || !std::isfinite(r); })) {
    throw Error(ErrorCode::InvalidArgument, "density must be finite and nonnegative");
  }
  const std::size_t cells = grid_.dim() == 1 ? cells_per_axis_ : cells_per_axis_ * cells_per_axis_;
  cdf_.resize(cells);
  double total = 0.0;
  for (std::size_t cell = 0; cell < cells; ++cell) {
    const auto k = corners(cell);
    double mass = 0.0;
    const int count = grid_.dim() == 1 ? 2 : 4;
    for (int j = 0; j < count; ++j) mass += rho_[k[j]];
    total += mass / count;
    cdf_[cell] = total;
  }
  if (!(total > 0.0)) throw Error(ErrorCode::ZeroDensity, "density integrates to zero");
}

std::array<std::size_t, 4> DensitySampler::corners(std::size_t cell) const {
  const std::size_t n = grid_.n();
  if (grid_.dim() == 1) return {cell, (cell + 1) % n, 0, 0};
  const std::size_t i = cell / cells_per_axis_;
  const std::size_t j = cell % cells_per_axis_;
  const std::size_t i1 = (i + 1) % n;
  const std::size_t j1 = (j + 1) % n;
  return {grid_.index(i, j), grid_.index(i1, j), grid_.index(i, j1), grid_.index(i1, j1)};
}

Point DensitySampler::draw(std::mt19937_64& rng) const {
  const double target = uniform01(rng) * cdf_.back();
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), target);
  if (it == cdf_.end()) --it;  // only reachable through rounding of target
  const auto cell = static_cast<std::size_t>(it - cdf_.begin());
  const auto k = corners(cell);

  if (grid_.dim() == 1) {
    const double s = invert_linear_cell(rho_[k[0]], rho_[k[1]], uniform01(rng));
    return {grid_.coord(0, cell) + s * grid_.dx(0), 0.0};
  }
  const double top = std::max({rho_[k[0]], rho_[k[1]], rho_[k[2]], rho_[k[3]]});
  const std::size_t i = cell / cells_per_axis_;
  const std::size_t j = cell % cells_per_axis_;
  for (;;) {
    const double s = uniform01(rng);
    const double t = uniform01(rng);
    const double density = (1 - s) * (1 - t) * rho_[k[0]] + s * (1 - t) * rho_[k[1]] +
                           (1 - s) * t * rho_[k[2]] + s * t * rho_[k[3]];
    if (uniform01(rng) * top < density) {
      return {grid_.coord(0, i) + s * grid_.dx(0), grid_.coord(1, j) + t * grid_.dx(1)};
    }
  }
}

TrajectoryEnsemble sample_ensemble(const ScalarField& rho, std::size_t count, std::uint64_t seed) {
  const DensitySampler sampler(rho);
  std::mt19937_64 rng(seed);
  TrajectoryEnsemble e;
  e.dim = rho.grid.dim();
  e.seed = seed;
  e.positions.reserve(count);
  for (std::size_t k = 0; k < count; ++k) e.positions.push_back(sampler.draw(rng));
  e.velocities.assign(count, Point{0.0, 0.0});
  e.valid.assign(count, 1);
  return e;
}

VelocityField::VelocityField(const MadelungFields& fields, const PhysicalConstants& c)
    : grid_(fields.grid), v_(gradients(fields.grid, fields.S, fields.action_jump)), node_(fields.node) {
  c.validate();
  for (int a = 0; a < grid_.dim(); ++a) {
    for (auto& x : v_[a]) x /= c.mass;
  }
}

Point VelocityField::at(const Point& x) const {
  const auto s = interpolation_stencil(grid_, x);
  if (!s) throw Error(ErrorCode::LeftDomain, "particle left the grid");
  Point v{0.0, 0.0};
  for (int k = 0; k < s->count; ++k) {
    if (s->weight[k] == 0.0) continue;
    if (node_[s->index[k]]) throw Error(ErrorCode::NodeRegion, "velocity stencil touches a node");
    for (int a = 0; a < grid_.dim(); ++a) v[a] += s->weight[k] * v_[a][s->index[k]];
  }
  return v;
}

Point bohmian_velocity(const MadelungFields& fields, const PhysicalConstants& c, const Point& x) {
  return VelocityField(fields, c).at(x);
}

namespace {

Point velocity_at(std::span<const FieldFrame> frames, const Point& x, double t) {
  if (frames.size() == 1 || t <= frames.front().t) return frames.front().velocity.at(x);
  if (t >= frames.back().t) return frames.back().velocity.at(x);
  auto it = std::upper_bound(frames.begin(), frames.end(), t,
                             [](double tt, const FieldFrame& f) { return tt < f.t; });
  const FieldFrame& hi = *it;
  const FieldFrame& lo = *(it - 1);
  const double w = (t - lo.t) / (hi.t - lo.t);
  const Point a = lo.velocity.at(x);
  const Point b = hi.velocity.at(x);
  return {(1 - w) * a[0] + w * b[0], (1 - w) * a[1] + w * b[1]};
}

Point offset(const Point& x, double h, const Point& v) { return {x[0] + h * v[0], x[1] + h * v[1]}; }

}  // namespace

TrajectoryEnsemble advance(const TrajectoryEnsemble& ensemble, std::span<const FieldFrame> frames, double dt) {
  if (frames.empty()) throw Error(ErrorCode::InvalidArgument, "no field frames");
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  for (std::size_t i = 1; i < frames.size(); ++i) {
    if (!(frames[i].t > frames[i - 1].t)) throw Error(ErrorCode::InvalidArgument, "frame times must increase");
  }
  const double t0 = ensemble.t;
  const double t1 = frames.back().t;
  if (t1 < t0 - 1e-12) throw Error(ErrorCode::InvalidArgument, "frames end before the ensemble time");
  const double span_t = std::max(0.0, t1 - t0);
  const auto steps = span_t > 0.0 ? static_cast<std::size_t>(std::ceil(span_t / dt - 1e-9)) : std::size_t{0};
  const double h = steps > 0 ? span_t / static_cast<double>(steps) : 0.0;

  TrajectoryEnsemble out = ensemble;
  for (std::size_t k = 0; k < out.count(); ++k) {
    if (!out.valid[k]) continue;
    Point x = out.positions[k];
    try {
      for (std::size_t s = 0; s < steps; ++s) {
        const double t = t0 + static_cast<double>(s) * h;
        const Point k1 = velocity_at(frames, x, t);
        const Point k2 = velocity_at(frames, offset(x, 0.5 * h, k1), t + 0.5 * h);
        const Point k3 = velocity_at(frames, offset(x, 0.5 * h, k2), t + 0.5 * h);
        const Point k4 = velocity_at(frames, offset(x, h, k3), t + h);
        for (int a = 0; a < 2; ++a) x[a] += h / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
      }
      out.positions[k] = x;
      out.velocities[k] = velocity_at(frames, x, t1);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NodeRegion) throw;
      out.valid[k] = 0;
      out.positions[k] = x;
      out.velocities[k] = {0.0, 0.0};
    }
  }
  out.t = std::max(t0, t1);
  return out;
}

double NewtonianTrajectory::energy(std::size_t i, const Potential& v, int dim, const PhysicalConstants& c) const {
  const double p2 = p[i][0] * p[i][0] + p[i][1] * p[i][1];
  return p2 / (2.0 * c.mass) + v.value_at(x[i], dim, c);
}

NewtonianTrajectory newtonian_oracle(const Point& x0, const Point& p0, const Potential& v,
                                     const PhysicalConstants& c, int dim, double dt, double t_end) {
  c.validate();
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  if (!(t_end >= 0.0)) throw Error(ErrorCode::InvalidArgument, "t_end must be >= 0");
  const auto steps = t_end > 0.0 ? static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9)) : std::size_t{0};
  const double h = steps > 0 ? t_end / static_cast<double>(steps) : 0.0;
  const double inv_m = 1.0 / c.mass;

  NewtonianTrajectory out;
  out.t.reserve(steps + 1);
  out.x.reserve(steps + 1);
  out.p.reserve(steps + 1);
  Point x = x0;
  Point p = p0;
  if (dim == 1) x[1] = p[1] = 0.0;
  out.t.push_back(0.0);
  out.x.push_back(x);
  out.p.push_back(p);
  auto force = [&](const Point& at) { return v.force_at(at, dim, c); };
  for (std::size_t s = 1; s <= steps; ++s) {
    const Point f1 = force(x);
    const Point x2 = offset(x, 0.5 * h * inv_m, p);
    const Point p2 = offset(p, 0.5 * h, f1);
    const Point f2 = force(x2);
    const Point x3 = offset(x, 0.5 * h * inv_m, p2);
    const Point p3 = offset(p, 0.5 * h, f2);
    const Point f3 = force(x3);
    const Point x4 = offset(x, h * inv_m, p3);
    const Point p4 = offset(p, h, f3);
    const Point f4 = force(x4);
    for (int a = 0; a < dim; ++a) {
      x[a] += h / 6.0 * inv_m * (p[a] + 2.0 * p2[a] + 2.0 * p3[a] + p4[a]);
      p[a] += h / 6.0 * (f1[a] + 2.0 * f2[a] + 2.0 * f3[a] + f4[a]);
    }
    out.t.push_back(static_cast<double>(s) * h);
    out.x.push_back(x);
    out.p.push_back(p);
  }
  return out;
}

Point crest_position(const ScalarField& rho) {
  const Grid& g = rho.grid;
  const auto it = std::max_element(rho.values.begin(), rho.values.end());
  const auto flat = static_cast<std::size_t>(it - rho.values.begin());
  const auto idx = g.unravel(flat);
  Point p = g.point(flat);
  const std::size_t n = g.n();
  for (int a = 0; a < g.dim(); ++a) {
    const std::size_t i = idx[a];
    if (!g.periodic() && (i == 0 || i + 1 == n)) continue;
    auto at = [&](std::size_t j) {
      auto k = idx;
      k[a] = j;
      return rho.values[g.index(k[0], k[1])];
    };
    const double fm = at((i + n - 1) % n);
    const double f0 = at(i);
    const double fp = at((i + 1) % n);
    const double denom = fm - 2.0 * f0 + fp;
    if (denom < 0.0) p[a] += 0.5 * (fm - fp) / denom * g.dx(a);
  }
  return p;
}

double ks_statistic(std::span<const double> samples, const ScalarField& rho) {
  const Grid& g = rho.grid;
  if (g.dim() != 1) throw Error(ErrorCode::InvalidArgument, "KS statistic is defined for 1D grids");
  if (samples.empty()) throw Error(ErrorCode::InvalidArgument, "no samples");
  const std::size_t n = g.n();
  const std::size_t cells = g.periodic() ? n : n - 1;
  std::vector<double> cdf(cells + 1, 0.0);
  for (std::size_t c = 0; c < cells; ++c) {
    cdf[c + 1] = cdf[c] + 0.5 * (rho.values[c] + rho.values[(c + 1) % n]);
  }
  const double total = cdf.back();
  if (!(total > 0.0)) throw Error(ErrorCode::ZeroDensity, "density integrates to zero");

  std::vector<double> xs(samples.begin(), samples.end());
  const double x0 = g.bounds(0).min;
  const double L = g.length(0);
  for (auto& x : xs) {
    if (g.periodic()) {
      x = x0 + std::fmod(x - x0, L);
      if (x < x0) x += L;
    }
  }
  std::sort(xs.begin(), xs.end());
  auto F = [&](double x) {
    const double u = (x - x0) / g.dx(0);
    if (u <= 0.0) return 0.0;
    if (u >= static_cast<double>(cells)) return 1.0;
    const auto c = static_cast<std::size_t>(u);
    const double s = u - static_cast<double>(c);
    return (cdf[c] + cell_partial_mass(rho.values[c], rho.values[(c + 1) % n], s)) / total;
  };
  const double count = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = F(xs[i]);
    d = std::max({d, std::abs(f - static_cast<double>(i) / count), std::abs(static_cast<double>(i + 1) / count - f)});
  }
  return d;
}

}  // namespace wavemech
