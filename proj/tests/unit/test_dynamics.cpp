#include <doctest.h>

#include <cmath>
#include <numbers>

#include "../oracles.hpp"
#include "check.hpp"
#include "wavemech/dynamics.hpp"
#include "wavemech/states.hpp"

using namespace wavemech;

namespace {

const PhysicalConstants kUnits{};

GaussianPacket packet(double x0, double sigma, double p0, double chirp = 0.0) {
  return GaussianPacket{{x0, 0.0}, sigma, {p0, 0.0}, chirp};
}

double classical_energy(const MadelungFields& f, const Potential& v, const PhysicalConstants& c) {
  const auto grad = gradient(f.grid, f.S, 0, f.action_jump);
  const auto vv = v.values(f.grid, c);
  double e = 0.0;
  for (std::size_t i = 0; i < grad.size(); ++i) {
    e += f.R[i] * f.R[i] * (grad[i] * grad[i] / (2 * c.mass) + vv[i]);
  }
  return e * f.grid.cell_volume();
}

// Gaussian density with S = p x + a sin(2 k0 x): periodic up to the ramp, so spectral
// derivatives see no seam, and the flow compresses without reaching a caustic soon.
MadelungFields wavy_fields(const Grid& g, double p, double a) {
  auto f = gaussian_fields(g, packet(0, 1.0, p));
  const double k0 = 2 * std::numbers::pi / g.length(0);
  for (std::size_t i = 0; i < g.size(); ++i) f.S[i] += a * std::sin(2 * k0 * g.coord(0, i));
  return f;
}

}  // namespace

TEST_CASE("step_linear: plane wave picks up the free phase") {
  const Grid g = Grid::line(128, 0, 2 * std::numbers::pi);
  const double k = 5.0;
  const double dt = 0.01;
  WaveFunction psi(g);
  for (std::size_t i = 0; i < g.size(); ++i) psi.values[i] = std::polar(1.0, k * g.coord(0, i));
  const auto out = step_linear(psi, Potential::free(), kUnits, dt);
  const cplx phase = std::polar(1.0, -k * k * dt / 2);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(std::abs(out.values[i] - psi.values[i] * phase) < 1e-13);
  }
}

TEST_CASE("step_linear: needs a periodic power-of-two grid") {
  const Grid g = Grid::line(128, -1, 1, Boundary::AbsorbingPad);
  const auto psi = gaussian_wave(g, packet(0, 0.2, 0), kUnits);
  CHECK(error_code_of([&] { step_linear(psi, Potential::free(), kUnits, 0.01); }) == ErrorCode::NonPeriodicGrid);
}

TEST_CASE("linear evolver: free Gaussian spreads like the analytic packet") {
  const Grid g = Grid::line(1024, -25.6, 25.6);
  EvolverConfig cfg;
  cfg.dt = 0.01;
  cfg.t_end = 2.0;
  cfg.snapshot_stride = 10;
  const auto res = evolve(gaussian_wave(g, packet(0, 1.0, 1.0), kUnits), Potential::free(), kUnits, cfg);
  REQUIRE(res.records.size() == 21);
  for (const auto& r : res.records) CHECK(std::abs(r.sigma_x / oracle::free_width(1.0, r.t) - 1) < 1e-3);
}

TEST_CASE("linear evolver: coherent state oscillates as x0 cos(w t) and conserves norm and energy") {
  const Grid g = Grid::line(512, -16, 16);
  EvolverConfig cfg;
  cfg.dt = 0.01;
  cfg.t_end = 2.0;
  cfg.snapshot_stride = 5;
  const auto v = Potential::harmonic(1.0);
  const auto res = evolve(gaussian_wave(g, packet(2.0, std::sqrt(0.5), 0.0), kUnits), v, kUnits, cfg);
  for (const auto& r : res.records) {
    CHECK(std::abs(r.mean_x - oracle::oscillator_x(2.0, 0.0, 1.0, r.t)) < 1e-3 * 2.0);
    CHECK(std::abs(r.norm - res.records.front().norm) < 1e-10);
    CHECK(std::abs(r.energy / res.records.front().energy - 1) < 1e-6);
  }
}

TEST_CASE("evolve: t_end = 0 returns the initial state and one snapshot") {
  const Grid g = Grid::line(128, -8, 8);
  const auto psi = gaussian_wave(g, packet(0, 1, 0), kUnits);
  EvolverConfig cfg;
  cfg.t_end = 0.0;
  std::size_t calls = 0;
  const Observer count = [&](const Snapshot&) { ++calls; };
  const auto res = evolve(psi, Potential::free(), kUnits, cfg, std::span<const Observer>(&count, 1));
  CHECK(calls == 1);
  CHECK(res.records.size() == 1);
  CHECK(std::get<WaveFunction>(res.final_state).values == psi.values);
}

TEST_CASE("evolve: linear norm drift over 1000 steps stays below 1e-10") {
  const Grid g = Grid::line(256, -12, 12);
  EvolverConfig cfg;
  cfg.dt = 0.005;
  cfg.t_end = 5.0;
  cfg.snapshot_stride = 1000;
  const auto res = evolve(gaussian_wave(g, packet(1, 0.8, 0.5), kUnits), Potential::quartic(0.1), kUnits, cfg);
  CHECK(std::abs(res.records.back().norm - res.records.front().norm) < 1e-10);
}

TEST_CASE("step_classical: rigid advection keeps the width") {
  const Grid g = Grid::line(1024, -12.8, 12.8);
  const auto f0 = gaussian_fields(g, packet(0, 0.5, 2.0));
  const auto m0 = moments(f0, kUnits);
  auto f = f0;
  const double dt = 0.005;
  for (int k = 0; k < 100; ++k) f = step_classical(f, Potential::free(), kUnits, dt);
  const auto m1 = moments(f, kUnits);
  CHECK(std::abs(m1.sigma_x / m0.sigma_x - 1) < 1e-6);
  CHECK(m1.mean_x == doctest::Approx(2.0 * 100 * dt).epsilon(1e-9));
}

TEST_CASE("step_classical: uniform force shifts grad S by -F dt") {
  const Grid g = Grid::line(512, -16, 16, Boundary::AbsorbingPad);
  const double p = 1.0, force = 0.7, dt = 0.01;
  auto f = gaussian_fields(g, packet(0, 1.0, p));
  f = step_classical(f, Potential::linear_tilt(force), kUnits, dt);
  const auto grad = gradient(g, f.S, 0, f.action_jump);
  for (double gs : grad) CHECK(gs == doctest::Approx(p - force * dt).epsilon(1e-12));
}

TEST_CASE("step_classical: uniform force on a periodic grid") {
  const Grid g = Grid::line(256, -16, 16);
  const double p = 1.0, force = 0.7, dt = 0.01;
  auto f = gaussian_fields(g, packet(0, 1.0, p));
  f = step_classical(f, Potential::linear_tilt(force), kUnits, dt);
  for (double gs : gradient(g, f.S, 0, f.action_jump)) CHECK(gs == doctest::Approx(p - force * dt).epsilon(1e-10));
}

TEST_CASE("step_classical: S = 0 and V = 0 is a fixed point") {
  const Grid g = Grid::line(256, -8, 8);
  const auto f0 = gaussian_fields(g, packet(0.3, 1.0, 0.0));
  const auto f1 = step_classical(f0, Potential::free(), kUnits, 0.01);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(f1.R[i] == doctest::Approx(f0.R[i]).epsilon(1e-14));
    CHECK(f1.S[i] == f0.S[i]);
  }
}

TEST_CASE("step_classical: NaN input is a numerical blowup") {
  const Grid g = Grid::line(64, -4, 4);
  auto f = gaussian_fields(g, packet(0, 1.0, 0.0));
  f.S[10] = std::nan("");
  CHECK(error_code_of([&] { step_classical(f, Potential::free(), kUnits, 0.01); }) == ErrorCode::NumericalBlowup);
}

TEST_CASE("classical evolver: mass conserved over 1000 periodic steps") {
  const Grid g = Grid::line(256, -16, 16);
  EvolverConfig cfg;
  cfg.kind = EvolverKind::Classical;
  cfg.dt = 0.002;
  cfg.t_end = 2.0;
  cfg.snapshot_stride = 1000;
  const auto res = evolve(wavy_fields(g, 1.0, 0.3), Potential::free(), kUnits, cfg);
  CHECK(res.substeps >= 1000);
  CHECK(std::abs(res.records.back().norm / res.records.front().norm - 1) < 1e-8);
}

TEST_CASE("classical evolver: energy drift below 1e-4 before the caustic") {
  const Grid g = Grid::line(1024, -8, 8, Boundary::AbsorbingPad);
  const auto v = Potential::harmonic(1.0);
  auto f = gaussian_fields(g, packet(2.0, std::sqrt(0.5), 0.0));
  const double e0 = classical_energy(f, v, kUnits);
  EvolverConfig cfg;
  cfg.kind = EvolverKind::Classical;
  cfg.dt = 0.01;
  cfg.t_end = 1.0;
  const auto res = evolve(f, v, kUnits, cfg);
  const double e1 = classical_energy(std::get<MadelungFields>(res.final_state), v, kUnits);
  CHECK(std::abs(e1 / e0 - 1) < 1e-4);
}

TEST_CASE("classical evolver: focusing flow stops near t = m/a") {
  const Grid g = Grid::line(1024, -16, 16, Boundary::AbsorbingPad);
  EvolverConfig cfg;
  cfg.kind = EvolverKind::Classical;
  cfg.dt = 0.002;
  cfg.t_end = 2.0;
  const double a = 1.0;
  try {
    evolve(gaussian_fields(g, packet(0, 2.0, 0.0, a)), Potential::free(), kUnits, cfg);
    FAIL("expected a caustic");
  } catch (const CausticError& e) {
    CHECK(e.code() == ErrorCode::CausticDetected);
    CHECK(std::abs(e.report().time - kUnits.mass / a) < 0.1 * kUnits.mass / a);
  }
}

TEST_CASE("detect_caustic examples") {
  const Grid g = Grid::line(256, -8, 8, Boundary::AbsorbingPad);
  const auto plane = gaussian_fields(g, packet(0, 1.0, 2.0));
  CHECK_FALSE(detect_caustic(plane, kUnits, 0.5, 0.1).has_value());

  const auto focus = gaussian_fields(g, packet(0, 1.0, 0.0, 1.0));  // lap S = -1
  CHECK_FALSE(detect_caustic(focus, kUnits, 0.05, 0.1).has_value());
  const auto hit = detect_caustic(focus, kUnits, 0.2, 0.1);
  REQUIRE(hit.has_value());
  CHECK(hit->metric == CausticMetric::Compression);
  CHECK(hit->value == doctest::Approx(0.2).epsilon(1e-6));
  CHECK_FALSE(detect_caustic(focus, kUnits, 0.2, std::numeric_limits<double>::infinity()).has_value());

  std::vector<double> raw = focus.rho();
  raw[100] = -1e-6 * *std::max_element(raw.begin(), raw.end());
  const auto neg = detect_caustic(focus, kUnits, 0.01, 0.1, raw);
  REQUIRE(neg.has_value());
  CHECK(neg->metric == CausticMetric::NegativeDensity);
  CHECK(neg->location[0] == doctest::Approx(g.coord(0, 100)));
}

TEST_CASE("cfl_limit follows safety * dx / max(|grad S|/m, hbar/(m dx))") {
  const Grid g = Grid::line(256, -8, 8, Boundary::AbsorbingPad);
  const double dx = g.dx();
  const auto fast = gaussian_fields(g, packet(0, 1.0, 40.0));
  CHECK(cfl_limit(State(fast), Potential::free(), kUnits, 0.5) == doctest::Approx(0.5 * dx / 40.0));
  const auto slow = gaussian_fields(g, packet(0, 1.0, 0.0));
  CHECK(cfl_limit(State(slow), Potential::free(), kUnits, 0.5) == doctest::Approx(0.5 * dx * dx));
}

TEST_CASE("evolve: snapshots uniform even when t_end is not a multiple of dt") {
  const Grid g = Grid::line(128, -8, 8);
  EvolverConfig cfg;
  cfg.dt = 0.03;
  cfg.t_end = 0.1;
  const auto res = evolve(gaussian_wave(g, packet(0, 1, 0), kUnits), Potential::free(), kUnits, cfg);
  REQUIRE(res.records.size() == 5);
  for (std::size_t i = 0; i < res.records.size(); ++i) CHECK(res.records[i].t == doctest::Approx(0.025 * i));
}

TEST_CASE("temporal convergence order of both steppers") {
  const Grid g = Grid::line(256, -8, 8);
  const auto v = Potential::harmonic(1.0);
  const double t_end = 0.5;

  auto linear_at = [&](double dt) {
    auto psi = gaussian_wave(g, packet(1.0, 0.7, 0.5), kUnits);
    const int steps = static_cast<int>(std::lround(t_end / dt));
    for (int k = 0; k < steps; ++k) psi = step_linear(psi, v, kUnits, dt);
    return psi;
  };
  // V and a chirped S are not periodic, so the classical run uses the finite-difference grid.
  const Grid ga = Grid::line(256, -8, 8, Boundary::AbsorbingPad);
  auto classical_at = [&](double dt) {
    auto f = gaussian_fields(ga, packet(1.0, 0.7, 0.5, -0.3));
    const int steps = static_cast<int>(std::lround(t_end / dt));
    for (int k = 0; k < steps; ++k) f = step_classical(f, v, kUnits, dt);
    return f;
  };

  const auto ref_l = linear_at(0.0125 / 32);
  const auto ref_c = classical_at(0.0125 / 32);
  std::vector<double> el, ec;
  for (double dt : {0.0125, 0.00625, 0.003125}) {  // dt max|V| stays below 0.5
    const auto l = linear_at(dt);
    const auto c = classical_at(dt);
    double a = 0.0, b = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      a = std::max(a, std::abs(l.values[i] - ref_l.values[i]));
      // The pad taper acts once per step and is not a consistent discretization; skip it.
      if (std::abs(ga.coord(0, i)) < 5) b = std::max(b, std::abs(c.R[i] - ref_c.R[i]));
    }
    el.push_back(a);
    ec.push_back(b);
  }
  for (std::size_t k = 1; k < el.size(); ++k) {
    CHECK(std::log2(el[k - 1] / el[k]) >= 1.9);
    CHECK(std::log2(ec[k - 1] / ec[k]) >= 1.9);
  }
}

TEST_CASE("recomposed classical states satisfy the classical wave equation to second order") {
  // Residual of [p^2/2m + V - Q] psi - i hbar d/dt psi with a centered time difference.
  auto residual = [](double dt) {
    const Grid g = Grid::line(512, -16, 16);
    EvolverConfig cfg;
    cfg.kind = EvolverKind::Classical;
    cfg.dt = dt;
    cfg.t_end = 0.5;
    std::vector<WaveFunction> psi;
    std::vector<MadelungFields> fields;
    const Observer keep = [&](const Snapshot& s) {
      const auto& f = std::get<MadelungFields>(s.state);
      fields.push_back(f);
      psi.push_back(recompose(f, kUnits));
    };
    evolve(wavy_fields(g, 1.0, 0.3), Potential::free(), kUnits, cfg,
           std::span<const Observer>(&keep, 1));
    const std::size_t k = psi.size() / 2;
    const auto lap = laplacian(g, psi[k].values);
    const auto q = quantum_potential(fields[k].amplitude(), kUnits);
    const double rmax = *std::max_element(fields[k].R.begin(), fields[k].R.end());
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (fields[k].R[i] < 1e-2 * rmax) continue;
      const cplx dpsi = (psi[k + 1].values[i] - psi[k - 1].values[i]) / (2 * dt);
      const cplx h = -0.5 * lap[i] - q.Q.values[i] * psi[k].values[i];
      worst = std::max(worst, std::abs(h - cplx(0, 1) * dpsi));
    }
    return worst;
  };
  const double coarse = residual(0.02);
  const double fine = residual(0.01);
  CHECK(coarse < 1e-2);
  CHECK(std::log2(coarse / fine) >= 1.8);
}

TEST_CASE("EvolverConfig validation") {
  EvolverConfig cfg;
  cfg.dt = 0.0;
  CHECK(error_code_of([&] { cfg.validate(); }) == ErrorCode::InvalidArgument);
  cfg.dt = 0.01;
  cfg.cfl_safety = 1.5;
  CHECK(error_code_of([&] { cfg.validate(); }) == ErrorCode::InvalidArgument);
}
