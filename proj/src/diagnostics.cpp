#include "wavemech/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "wavemech/error.hpp"

namespace wavemech {

namespace {

struct PositionMoments {
  double norm = 0.0;
  double mean = 0.0;
  double sigma = 0.0;
};

PositionMoments position_moments(const Grid& g, std::span<const double> rho) {
  double m0 = 0.0;
  double m1 = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const double x = g.coord(0, g.unravel(i)[0]);
    m0 += rho[i];
    m1 += rho[i] * x;
  }
  if (!(m0 > 0.0) || !std::isfinite(m0)) throw Error(ErrorCode::ZeroNorm, "state has zero norm");
  const double mean = m1 / m0;
  double var = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const double d = g.coord(0, g.unravel(i)[0]) - mean;
    var += rho[i] * d * d;
  }
  return {m0 * g.cell_volume(), mean, std::sqrt(var / m0)};
}

double weighted_mean(std::span<const double> w, std::span<const double> f) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    num += w[i] * f[i];
    den += w[i];
  }
  return num / den;
}

void add_potential_terms(DiagnosticsRecord& rec, const Grid& g, std::span<const double> rho,
                         const Potential* v, const PhysicalConstants& c) {
  if (v == nullptr) return;
  rec.energy += weighted_mean(rho, v->values(g, c));
  rec.mean_force = weighted_mean(rho, v->force(g, c, 0));
}

}  // namespace

DiagnosticsRecord moments(const WaveFunction& psi, const PhysicalConstants& c, const Potential* v,
                          double node_eps) {
  c.validate();
  const Grid& g = psi.grid;
  const auto rho = psi.density();
  const auto pos = position_moments(g, rho);
  DiagnosticsRecord rec;
  rec.norm = pos.norm;
  rec.mean_x = pos.mean;
  rec.sigma_x = pos.sigma;

  double p1 = 0.0;
  double p2 = 0.0;   // axis 0
  double k2 = 0.0;   // all axes, for the kinetic energy
  double w = 0.0;
  if (g.periodic()) {
    auto& ft = fourier(g);
    std::vector<cplx> spec(psi.values.size());
    ft.forward(psi.values, spec);
    for (std::size_t i = 0; i < spec.size(); ++i) {
      const auto idx = g.unravel(i);
      const double weight = std::norm(spec[i]);
      const double k0 = ft.wavenumbers(0)[idx[0]];
      double kk = k0 * k0;
      if (g.dim() == 2) kk += ft.wavenumbers(1)[idx[1]] * ft.wavenumbers(1)[idx[1]];
      w += weight;
      p1 += weight * k0;
      p2 += weight * k0 * k0;
      k2 += weight * kk;
    }
  } else {
    for (int a = 0; a < g.dim(); ++a) {
      const auto d = gradient(g, std::span<const cplx>(psi.values), a);
      for (std::size_t i = 0; i < d.size(); ++i) {
        const double dd = std::norm(d[i]);
        k2 += dd;
        if (a == 0) {
          p1 += (std::conj(psi.values[i]) * d[i]).imag();
          p2 += dd;
        }
      }
    }
    for (double r : rho) w += r;
  }
  const double mean_k = p1 / w;
  rec.mean_p = c.hbar * mean_k;
  rec.sigma_p = c.hbar * std::sqrt(std::max(0.0, p2 / w - mean_k * mean_k));
  rec.energy = c.hbar * c.hbar * (k2 / w) / (2.0 * c.mass);
  add_potential_terms(rec, g, rho, v, c);

  double max_amp = 0.0;
  for (double r : rho) max_amp = std::max(max_amp, r);
  const double node_rho = node_eps * node_eps * max_amp;
  rec.node_count = static_cast<std::size_t>(
      std::count_if(rho.begin(), rho.end(), [&](double r) { return r < node_rho; }));
  rec.min_rho = *std::min_element(rho.begin(), rho.end());
  return rec;
}

DiagnosticsRecord moments(const MadelungFields& fields, const PhysicalConstants& c, const Potential* v) {
  c.validate();
  const Grid& g = fields.grid;
  const auto rho = fields.rho();
  const auto pos = position_moments(g, rho);
  DiagnosticsRecord rec;
  rec.norm = pos.norm;
  rec.mean_x = pos.mean;
  rec.sigma_x = pos.sigma;

  const auto grad = gradients(g, fields.S, fields.action_jump);
  rec.mean_p = weighted_mean(rho, grad[0]);
  double var = 0.0;
  double kinetic = 0.0;
  double w = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const double d = grad[0][i] - rec.mean_p;
    double s2 = grad[0][i] * grad[0][i];
    if (g.dim() == 2) s2 += grad[1][i] * grad[1][i];
    var += rho[i] * d * d;
    kinetic += rho[i] * s2;
    w += rho[i];
  }
  rec.sigma_p = std::sqrt(var / w);
  rec.energy = kinetic / w / (2.0 * c.mass);
  add_potential_terms(rec, g, rho, v, c);
  rec.node_count = fields.node_count();
  rec.min_rho = *std::min_element(rho.begin(), rho.end());
  return rec;
}

DiagnosticsRecord moments(const State& state, const PhysicalConstants& c, const Potential* v) {
  return std::visit([&](const auto& s) { return moments(s, c, v); }, state);
}

double EhrenfestSeries::max_r1() const {
  return r1.empty() ? 0.0 : *std::max_element(r1.begin(), r1.end());
}

double EhrenfestSeries::max_r2() const {
  return r2.empty() ? 0.0 : *std::max_element(r2.begin(), r2.end());
}

EhrenfestSeries ehrenfest_residuals(std::span<const DiagnosticsRecord> records, const PhysicalConstants& c) {
  if (records.size() < 3) {
    throw Error(ErrorCode::InsufficientSnapshots, "Ehrenfest residuals need at least 3 snapshots");
  }
  const double h = records[1].t - records[0].t;
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "snapshot times must increase");
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (std::abs((records[i].t - records[i - 1].t) - h) > 1e-6 * h) {
      throw Error(ErrorCode::InvalidArgument, "snapshots are not uniformly spaced");
    }
  }
  EhrenfestSeries out;
  for (std::size_t i = 1; i + 1 < records.size(); ++i) {
    const double xm = records[i - 1].mean_x;
    const double x0 = records[i].mean_x;
    const double xp = records[i + 1].mean_x;
    const double velocity = (xp - xm) / (2.0 * h);
    const double accel = (xp - 2.0 * x0 + xm) / (h * h);
    out.t.push_back(records[i].t);
    out.r1.push_back(std::abs(velocity - records[i].mean_p / c.mass));
    out.r2.push_back(std::abs(c.mass * accel - records[i].mean_force));
  }
  return out;
}

EhrenfestSeries ehrenfest_residuals(std::span<const DiagnosticsRecord> records, const Potential& v,
                                    std::span<const State> states, const PhysicalConstants& c) {
  if (states.size() != records.size()) {
    throw Error(ErrorCode::InvalidArgument, "record and state series differ in length");
  }
  std::vector<DiagnosticsRecord> copy(records.begin(), records.end());
  for (std::size_t i = 0; i < copy.size(); ++i) {
    const Grid& g = grid_of(states[i]);
    const auto rho = std::visit(
        [](const auto& s) {
          if constexpr (std::is_same_v<std::decay_t<decltype(s)>, WaveFunction>) return s.density();
          else return s.rho();
        },
        states[i]);
    copy[i].mean_force = weighted_mean(rho, v.force(g, c, 0));
  }
  return ehrenfest_residuals(copy, c);
}

void attach_ehrenfest(std::vector<DiagnosticsRecord>& records, const PhysicalConstants& c) {
  if (records.size() < 3) return;
  const auto series = ehrenfest_residuals(records, c);
  for (std::size_t i = 0; i < series.t.size(); ++i) {
    records[i + 1].ehrenfest1 = series.r1[i];
    records[i + 1].ehrenfest2 = series.r2[i];
  }
}

}  // namespace wavemech
