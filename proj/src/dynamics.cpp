#include "wavemech/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

namespace wavemech {

namespace {

std::string caustic_message(const CausticReport& r) {
  std::ostringstream os;
  os << (r.metric == CausticMetric::Compression ? "compression metric " : "negative density ratio ")
     << r.value << " at x=" << r.location[0];
  if (std::isfinite(r.time)) os << ", t=" << r.time;
  return os.str();
}

void require_spectral(const Grid& g) {
  if (!g.periodic()) throw Error(ErrorCode::NonPeriodicGrid, "linear evolver needs a periodic grid");
  if (!g.spectral_ready()) {
    throw Error(ErrorCode::InvalidArgument, "spectral evolver needs a power-of-two point count");
  }
}

struct ClassicalRhs {
  const Grid& grid;
  const PhysicalConstants& c;
  const std::vector<double>& potential;

  void operator()(const std::vector<double>& rho, const std::vector<double>& S, const AxisJumps& jump,
                  std::vector<double>& drho, std::vector<double>& dS) const {
    const auto grad = gradients(grid, S, jump);
    std::array<std::vector<double>, 2> flux;
    const std::size_t size = rho.size();
    for (int a = 0; a < grid.dim(); ++a) flux[a].resize(size);
    dS.resize(size);
    const double inv_m = 1.0 / c.mass;
    for (std::size_t i = 0; i < size; ++i) {
      double g2 = 0.0;
      for (int a = 0; a < grid.dim(); ++a) {
        g2 += grad[a][i] * grad[a][i];
        flux[a][i] = rho[i] * grad[a][i] * inv_m;
      }
      dS[i] = -(0.5 * g2 * inv_m + potential[i]);
    }
    drho = divergence(grid, flux);
    for (auto& d : drho) d = -d;
  }
};

void axpy(std::vector<double>& out, const std::vector<double>& x, double a, const std::vector<double>& y) {
  out.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + a * y[i];
}

double max_gradient_speed(const MadelungFields& f, const PhysicalConstants& c) {
  const auto grad = gradients(f.grid, f.S, f.action_jump);
  double vmax = 0.0;
  for (std::size_t i = 0; i < f.S.size(); ++i) {
    if (f.node[i]) continue;
    double g2 = grad[0][i] * grad[0][i];
    if (f.grid.dim() == 2) g2 += grad[1][i] * grad[1][i];
    vmax = std::max(vmax, std::sqrt(g2) / c.mass);
  }
  return vmax;
}

double max_current_speed(const WaveFunction& psi, const PhysicalConstants& c) {
  const auto rho = psi.density();
  const double cutoff = 1e-6 * *std::max_element(rho.begin(), rho.end());
  std::array<std::vector<cplx>, 2> grad;
  for (int a = 0; a < psi.grid.dim(); ++a) grad[a] = gradient(psi.grid, std::span<const cplx>(psi.values), a);
  double vmax = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (rho[i] <= cutoff) continue;
    double v2 = 0.0;
    for (int a = 0; a < psi.grid.dim(); ++a) {
      const double j = (std::conj(psi.values[i]) * grad[a][i]).imag() * c.hbar / (c.mass * rho[i]);
      v2 += j * j;
    }
    vmax = std::max(vmax, std::sqrt(v2));
  }
  return vmax;
}

std::string at_time(double t) {
  std::ostringstream os;
  os << " (t=" << t << ")";
  return os.str();
}

}  // namespace

void EvolverConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "cfl safety factor must lie in (0, 1]");
  }
  if (!(caustic_threshold > 0.0)) throw Error(ErrorCode::InvalidArgument, "caustic threshold must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw Error(ErrorCode::InvalidArgument, "t_end must be >= 0");
  if (snapshot_stride == 0) throw Error(ErrorCode::InvalidArgument, "snapshot stride must be >= 1");
}

CausticError::CausticError(CausticReport report)
    : Error(ErrorCode::CausticDetected, caustic_message(report)), report_(report) {}

LinearPropagator::LinearPropagator(const Grid& grid, const Potential& v, const PhysicalConstants& c, double dt)
    : grid_(grid), dt_(dt) {
  c.validate();
  require_spectral(grid);
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  const auto V = v.values(grid, c);
  double vmax = 0.0;
  for (double x : V) vmax = std::max(vmax, std::abs(x));
  if (!(dt * vmax / c.hbar < 0.5)) {
    throw Error(ErrorCode::InvalidArgument, "dt max|V|/hbar must stay below 0.5");
  }
  half_kick_.resize(V.size());
  for (std::size_t i = 0; i < V.size(); ++i) half_kick_[i] = std::polar(1.0, -0.5 * V[i] * dt / c.hbar);
  auto& ft = fourier(grid);
  drift_.resize(V.size());
  for (std::size_t i = 0; i < V.size(); ++i) {
    const auto idx = grid.unravel(i);
    double k2 = 0.0;
    for (int a = 0; a < grid.dim(); ++a) {
      const double k = ft.wavenumbers(a)[idx[a]];
      k2 += k * k;
    }
    drift_[i] = std::polar(1.0, -c.hbar * k2 * dt / (2.0 * c.mass));
  }
}

void LinearPropagator::step(std::vector<cplx>& psi) const {
  auto& ft = fourier(grid_);
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= half_kick_[i];
  ft.forward(psi, psi);
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= drift_[i];
  ft.inverse(psi, psi);
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= half_kick_[i];
}

WaveFunction step_linear(const WaveFunction& psi, const Potential& v, const PhysicalConstants& c, double dt) {
  LinearPropagator prop(psi.grid, v, c, dt);
  WaveFunction out = psi;
  prop.step(out.values);
  return out;
}

void apply_absorbing_taper(const Grid& grid, std::vector<double>& rho) {
  if (grid.periodic()) return;
  const std::size_t n = grid.n();
  const std::size_t pad = std::max<std::size_t>(4, n / 16);
  auto weight = [&](std::size_t i) {
    const std::size_t d = std::min(i, n - 1 - i);
    if (d >= pad) return 1.0;
    const double s = std::sin(0.5 * std::numbers::pi * static_cast<double>(d) / static_cast<double>(pad));
    return s * s;
  };
  for (std::size_t flat = 0; flat < rho.size(); ++flat) {
    const auto idx = grid.unravel(flat);
    double w = weight(idx[0]);
    if (grid.dim() == 2) w *= weight(idx[1]);
    rho[flat] *= w;
  }
}

std::optional<CausticReport> detect_caustic(const MadelungFields& fields, const PhysicalConstants& c,
                                            double dt, double theta, std::span<const double> raw_rho) {
  if (!raw_rho.empty()) {
    const auto [mn, mx] = std::minmax_element(raw_rho.begin(), raw_rho.end());
    if (*mx > 0.0 && *mn < -kNegativeRhoCaustic * *mx) {
      CausticReport r;
      r.metric = CausticMetric::NegativeDensity;
      r.value = *mn / *mx;
      r.location = fields.grid.point(static_cast<std::size_t>(mn - raw_rho.begin()));
      return r;
    }
  }
  if (!std::isfinite(theta)) return std::nullopt;
  const auto lap = laplacian(fields.grid, fields.S, fields.action_jump);
  double worst = -1.0;
  std::size_t where = 0;
  for (std::size_t i = 0; i < lap.size(); ++i) {
    if (fields.node[i]) continue;
    const double m = std::abs(lap[i]) * dt / c.mass;
    if (m > worst) {
      worst = m;
      where = i;
    }
  }
  if (worst > theta) {
    CausticReport r;
    r.metric = CausticMetric::Compression;
    r.value = worst;
    r.location = fields.grid.point(where);
    return r;
  }
  return std::nullopt;
}

MadelungFields step_classical(const MadelungFields& fields, const Potential& v, const PhysicalConstants& c,
                              double dt, double caustic_threshold, ClassicalStepStats* stats) {
  c.validate();
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  if (auto report = detect_caustic(fields, c, dt, caustic_threshold)) throw CausticError(*report);

  const Grid& g = fields.grid;
  const auto V = v.values(g, c);
  const AxisJumps vjump = v.value_jump(g);
  const ClassicalRhs rhs{g, c, V};
  auto jump_at = [&](double h) {
    return AxisJumps{fields.action_jump[0] - vjump[0] * h, fields.action_jump[1] - vjump[1] * h};
  };

  const auto rho0 = fields.rho();
  const auto& S0 = fields.S;
  std::vector<double> k1r, k1s, k2r, k2s, k3r, k3s, k4r, k4s, rr, ss;
  rhs(rho0, S0, jump_at(0.0), k1r, k1s);
  axpy(rr, rho0, 0.5 * dt, k1r);
  axpy(ss, S0, 0.5 * dt, k1s);
  rhs(rr, ss, jump_at(0.5 * dt), k2r, k2s);
  axpy(rr, rho0, 0.5 * dt, k2r);
  axpy(ss, S0, 0.5 * dt, k2s);
  rhs(rr, ss, jump_at(0.5 * dt), k3r, k3s);
  axpy(rr, rho0, dt, k3r);
  axpy(ss, S0, dt, k3s);
  rhs(rr, ss, jump_at(dt), k4r, k4s);

  std::vector<double> rho(rho0.size());
  MadelungFields out(g);
  out.action_jump = g.periodic() ? jump_at(dt) : AxisJumps{0.0, 0.0};
  const double w = dt / 6.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    rho[i] = rho0[i] + w * (k1r[i] + 2.0 * k2r[i] + 2.0 * k3r[i] + k4r[i]);
    out.S[i] = S0[i] + w * (k1s[i] + 2.0 * k2s[i] + 2.0 * k3s[i] + k4s[i]);
    if (!std::isfinite(rho[i]) || !std::isfinite(out.S[i])) {
      throw Error(ErrorCode::NumericalBlowup, "non-finite sample in classical step");
    }
  }
  const auto [mn, mx] = std::minmax_element(rho.begin(), rho.end());
  if (stats != nullptr) *stats = {*mn, *mx};
  if (auto report = detect_caustic(out, c, dt, std::numeric_limits<double>::infinity(), rho)) {
    throw CausticError(*report);
  }
  // Anything left below zero is within the clamping tolerance of the detector.
  for (auto& r : rho) r = std::max(r, 0.0);
  apply_absorbing_taper(g, rho);
  for (std::size_t i = 0; i < rho.size(); ++i) out.R[i] = std::sqrt(rho[i]);
  return out;
}

double cfl_limit(const State& state, const Potential& v, const PhysicalConstants& c, double safety) {
  const Grid& g = grid_of(state);
  const double dx = g.min_dx();
  double speed = c.hbar / (c.mass * dx);
  double limit = std::numeric_limits<double>::infinity();
  if (const auto* psi = std::get_if<WaveFunction>(&state)) {
    speed = std::max(speed, max_current_speed(*psi, c));
    const double vmax = v.max_abs(g, c);
    if (vmax > 0.0) limit = 0.499 * c.hbar / vmax;
  } else {
    speed = std::max(speed, max_gradient_speed(std::get<MadelungFields>(state), c));
  }
  return std::min(limit, safety * dx / speed);
}

EvolveResult evolve(State initial, const Potential& v, const PhysicalConstants& c, const EvolverConfig& cfg,
                    std::span<const Observer> observers) {
  cfg.validate();
  c.validate();
  const bool classical = cfg.kind == EvolverKind::Classical;
  State state = std::move(initial);
  if (classical && std::holds_alternative<WaveFunction>(state)) {
    state = decompose(std::get<WaveFunction>(state), c);
  } else if (!classical && std::holds_alternative<MadelungFields>(state)) {
    state = recompose(std::get<MadelungFields>(state), c);
  }
  const Grid grid = grid_of(state);
  if (!classical) require_spectral(grid);
  if (grid.periodic() && !grid.spectral_ready()) {
    throw Error(ErrorCode::InvalidArgument, "spectral evolver needs a power-of-two point count");
  }

  EvolveResult result{state, 0.0, {}, 0};
  double raw_min_rho = std::numeric_limits<double>::quiet_NaN();
  auto notify = [&](std::size_t step, double t) {
    DiagnosticsRecord rec = moments(state, c, &v);
    rec.t = t;
    if (classical && std::isfinite(raw_min_rho)) rec.min_rho = raw_min_rho;
    result.records.push_back(rec);
    const Snapshot snap{result.records.size() - 1, step, t, state, result.records.back()};
    for (const auto& obs : observers) obs(snap);
  };
  notify(0, 0.0);

  const auto nsteps = cfg.t_end > 0.0
                          ? static_cast<std::size_t>(std::ceil(cfg.t_end / cfg.dt - 1e-9))
                          : std::size_t{0};
  // Uniform nominal step no larger than cfg.dt, so snapshots are evenly spaced.
  const double h = nsteps > 0 ? cfg.t_end / static_cast<double>(nsteps) : cfg.dt;
  std::unique_ptr<LinearPropagator> prop;
  double t = 0.0;
  for (std::size_t step = 1; step <= nsteps; ++step) {
    const double t0 = static_cast<double>(step - 1) * h;
    const double t1 = step == nsteps ? cfg.t_end : static_cast<double>(step) * h;
    const double limit = cfl_limit(state, v, c, cfg.cfl_safety);
    const auto k = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(h / limit - 1e-12)));
    const double sub = h / static_cast<double>(k);
    for (std::size_t j = 0; j < k; ++j) {
      t = t0 + static_cast<double>(j) * sub;
      try {
        if (classical) {
          auto& f = std::get<MadelungFields>(state);
          if (auto report = detect_caustic(f, c, h, cfg.caustic_threshold)) throw CausticError(*report);
          ClassicalStepStats stats;
          f = step_classical(f, v, c, sub, std::numeric_limits<double>::infinity(), &stats);
          raw_min_rho = stats.raw_min_rho;
        } else {
          if (!prop || std::abs(prop->dt() - sub) > 1e-15 * sub) {
            prop = std::make_unique<LinearPropagator>(grid, v, c, sub);
          }
          prop->step(std::get<WaveFunction>(state).values);
        }
      } catch (const CausticError& e) {
        CausticReport r = e.report();
        r.time = t;
        throw CausticError(r);
      } catch (const Error& e) {
        throw Error(e.code(), std::string(e.what()) + at_time(t));
      }
      ++result.substeps;
    }
    t = t1;
    if (!classical && !std::get<WaveFunction>(state).finite()) {
      throw Error(ErrorCode::NumericalBlowup, "non-finite wave function" + at_time(t));
    }
    if (step % cfg.snapshot_stride == 0 || step == nsteps) notify(step, t);
  }
  result.final_state = state;
  result.t_final = t;
  return result;
}

}  // namespace wavemech
