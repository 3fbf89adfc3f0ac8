#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "../oracles.hpp"
#include "check.hpp"
#include "wavemech/fields.hpp"
#include "wavemech/states.hpp"

using namespace wavemech;

namespace {

const PhysicalConstants kUnits{};

WaveFunction plane_gaussian(const Grid& g, double sigma, double p) {
  WaveFunction psi(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.coord(0, i);
    psi.values[i] = std::polar(std::exp(-x * x / (4 * sigma * sigma)), p * x);
  }
  return psi;
}

double max_abs_diff(std::span<const cplx> a, std::span<const cplx> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("decompose: Gaussian with plane phase gives R = G and S = p x") {
  const Grid g = Grid::line(512, -16, 16);
  const double p = 1.5;
  const auto psi = plane_gaussian(g, 1.0, p);
  const auto f = decompose(psi, kUnits);
  const std::size_t mid = g.nearest(0, 0.0);
  double worst_r = 0.0, worst_s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.coord(0, i);
    worst_r = std::max(worst_r, std::abs(f.R[i] - std::exp(-x * x / 4)));
    if (f.R[i] > 1e-6) worst_s = std::max(worst_s, std::abs((f.S[i] - f.S[mid]) - p * x));
  }
  CHECK(worst_r < 1e-14);
  CHECK(worst_s < 1e-9);
  // Only the far tails, below 1e-10 of the peak, count as nodes.
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (f.R[i] > 1e-9) CHECK(f.node[i] == 0);
  }
}

TEST_CASE("decompose: real positive psi has S = 0 and R = psi") {
  const Grid g = Grid::line(256, -8, 8, Boundary::AbsorbingPad);
  const auto psi = plane_gaussian(g, 1.0, 0.0);
  const auto f = decompose(psi, kUnits);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(f.S[i] == 0.0);
    CHECK(f.R[i] == doctest::Approx(psi.values[i].real()).epsilon(1e-15));
  }
}

TEST_CASE("decompose: all-zero field is rejected") {
  const Grid g = Grid::line(64, -1, 1);
  CHECK(error_code_of([&] { decompose(WaveFunction(g), kUnits); }) == ErrorCode::AllZeroField);
}

TEST_CASE("roundtrip recompose(decompose(psi)) on node-free psi") {
  const Grid g = Grid::line(512, -10, 10);
  WaveFunction psi(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.coord(0, i);
    psi.values[i] = std::polar(1.2 + std::cos(x), 3.0 * std::sin(0.7 * x) + 0.4 * x * x);
  }
  const auto back = recompose(decompose(psi, kUnits), kUnits);
  CHECK(max_abs_diff(back.values, psi.values) < 1e-12 * 2.2);
}

TEST_CASE("recompose basics and decompose(recompose) identity") {
  const Grid g = Grid::line(128, -4, 4, Boundary::AbsorbingPad);
  MadelungFields one(g, std::vector<double>(g.size(), 1.0), std::vector<double>(g.size(), 0.0));
  for (const auto& z : recompose(one, kUnits).values) CHECK(z == cplx(1.0, 0.0));

  std::vector<double> r(g.size()), s(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.coord(0, i);
    r[i] = 0.5 + std::exp(-x * x);
    s[i] = 2.0 * x + 0.3 * x * x;  // well past 2 pi at the edges: must come back unwrapped
  }
  const auto f = decompose(recompose(MadelungFields(g, r, s), kUnits), kUnits);
  const std::size_t ref = g.nearest(0, 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(f.R[i] == doctest::Approx(r[i]).epsilon(1e-13));
    CHECK(f.S[i] - f.S[ref] == doctest::Approx(s[i] - s[ref]).epsilon(1e-9));
  }
}

TEST_CASE("decompose never returns negative R") {
  const Grid g = Grid::line(256, -5, 5);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  WaveFunction psi(g);
  for (auto& z : psi.values) z = {n(rng), n(rng)};
  for (double r : decompose(psi, kUnits).R) CHECK(r >= 0.0);
}

TEST_CASE("gauge: a global phase shifts S by a constant only") {
  const Grid g = Grid::line(256, -8, 8);
  const auto psi = plane_gaussian(g, 1.0, 0.8);
  WaveFunction rot = psi;
  const double theta = 1.1;
  for (auto& z : rot.values) z *= std::polar(1.0, theta);
  const auto a = decompose(psi, kUnits);
  const auto b = decompose(rot, kUnits);
  const double shift = b.S[0] - a.S[0];
  const double wrapped = std::remainder(shift - theta, 2 * std::numbers::pi);
  CHECK(std::abs(wrapped) < 1e-12);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(b.S[i] - a.S[i] == doctest::Approx(shift).epsilon(1e-12));
    CHECK(b.R[i] == doctest::Approx(a.R[i]).epsilon(4e-16));
  }
}

TEST_CASE("quantum potential of a Gaussian matches the closed form (spectral)") {
  const Grid g = Grid::line(512, -16, 16);
  const double s = 1.0;
  std::vector<double> r(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) r[i] = std::exp(-std::pow(g.coord(0, i), 2) / (4 * s * s));
  const auto q = quantum_potential(ScalarField(g, r), kUnits);
  const std::size_t mid = g.nearest(0, 0.0);
  CHECK(q.Q.values[mid] == doctest::Approx(1.0 / (4 * s * s)).epsilon(1e-10));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.coord(0, i);
    if (std::abs(x) < 5) CHECK(std::abs(q.Q.values[i] - oracle::gaussian_q(x, s)) < 1e-8);
  }
}

TEST_CASE("quantum potential: finite-difference path converges at second order") {
  const double s = 1.0;
  std::vector<double> err;
  for (std::size_t n : {128, 256, 512, 1024}) {
    const Grid g = Grid::line(n, -10, 10, Boundary::AbsorbingPad);
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = std::exp(-std::pow(g.coord(0, i), 2) / (4 * s * s));
    const auto q = quantum_potential(ScalarField(g, r), kUnits);
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = g.coord(0, i);
      if (std::abs(x) <= 3) e = std::max(e, std::abs(q.Q.values[i] - oracle::gaussian_q(x, s)));
    }
    err.push_back(e);
  }
  for (std::size_t k = 1; k < err.size(); ++k) {
    const double order = std::log2(err[k - 1] / err[k]);
    CHECK(order >= 1.8);
    CHECK(order <= 2.2);
  }
}

TEST_CASE("quantum potential: constant R gives zero, cosine R matches analytic form") {
  const Grid g = Grid::line(256, 0, 2 * std::numbers::pi);
  const auto flat = quantum_potential(ScalarField(g, std::vector<double>(g.size(), 3.0)), kUnits);
  for (double q : flat.Q.values) CHECK(std::abs(q) < 1e-12);

  const double k = 3.0;
  std::vector<double> r(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) r[i] = std::cos(k * g.coord(0, i)) + 2.0;
  const auto q = quantum_potential(ScalarField(g, r), kUnits);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(std::abs(q.Q.values[i] - oracle::cosine_q(g.coord(0, i), k)) < 1e-11);
  }
}

TEST_CASE("quantum potential: samples below the regularization floor are zeroed and flagged") {
  const Grid g = Grid::line(256, -20, 20, Boundary::AbsorbingPad);
  std::vector<double> r(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) r[i] = std::exp(-std::pow(g.coord(0, i), 2) / 4);
  const auto q = quantum_potential(ScalarField(g, r), kUnits);
  CHECK(q.regularized_count > 0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (q.regularized[i]) CHECK(q.Q.values[i] == 0.0);
  }
  CHECK(error_code_of([&] { quantum_potential(ScalarField(g), kUnits); }) == ErrorCode::AllZeroField);
}

TEST_CASE("winding: vortices recover their index") {
  const Grid g = Grid::square(128, {-8, 8}, {-8, 8});
  for (int n : {-2, 0, 1, 3}) {
    CAPTURE(n);
    const auto f = decompose(vortex_wave(g, n, 2.0), kUnits);
    const auto loop = circular_loop(g, {0, 0}, 2.0);
    const auto w = winding_circulation(f, loop, kUnits);
    CHECK(w.n == n);
    CHECK(w.residual < 1e-9);
  }
}

TEST_CASE("winding: real positive psi has n = 0") {
  const Grid g = Grid::square(64, {-4, 4}, {-4, 4});
  WaveFunction psi(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point x = g.point(i);
    psi.values[i] = std::exp(-(x[0] * x[0] + x[1] * x[1]) / 4);
  }
  const auto w = winding_circulation(decompose(psi, kUnits), circular_loop(g, {0, 0}, 1.5), kUnits);
  CHECK(w.n == 0);
  CHECK(w.circulation == doctest::Approx(0.0));
}

TEST_CASE("winding: smooth noise below 0.1 hbar leaves n unchanged") {
  const Grid g = Grid::square(128, {-8, 8}, {-8, 8});
  auto f = decompose(vortex_wave(g, 3, 2.0), kUnits);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point x = g.point(i);
    f.S[i] += 0.09 * std::sin(0.7 * x[0] + 0.3) * std::cos(0.5 * x[1]);
  }
  const auto w = winding_circulation(f, circular_loop(g, {0, 0}, 2.0), kUnits);
  CHECK(w.n == 3);
}

TEST_CASE("winding: loop through a node is rejected") {
  const Grid g = Grid::square(64, {-4, 4}, {-4, 4});
  auto f = decompose(vortex_wave(g, 1, 1.0), kUnits);
  const auto loop = circular_loop(g, {0, 0}, 1.0);
  f.node[loop[2]] = 1;
  CHECK(error_code_of([&] { winding_circulation(f, loop, kUnits); }) == ErrorCode::LoopThroughNode);
}

TEST_CASE("decompose flags nodes and continues S from a neighbour") {
  const Grid g = Grid::line(64, -1, 1, Boundary::AbsorbingPad);
  WaveFunction psi(g);
  for (std::size_t i = 0; i < g.size(); ++i) psi.values[i] = g.coord(0, i);  // zero at x = 0
  const auto f = decompose(psi, kUnits);
  const std::size_t mid = g.nearest(0, 0.0);
  CHECK(f.node[mid] == 1);
  CHECK(f.node_count() == 1);
  CHECK((f.S[mid] == f.S[mid - 1] || f.S[mid] == f.S[mid + 1]));
}
