#include <doctest.h>

#include <cmath>
#include <numbers>

#include "check.hpp"
#include "../oracles.hpp"
#include "wavemech/diagnostics.hpp"
#include "wavemech/states.hpp"
#include "wavemech/statistics.hpp"

using namespace wavemech;

namespace {

const PhysicalConstants kUnits{};

double norm_of(const MadelungFields& f) { return integrate(f.grid, f.rho()); }

double width_of(const MadelungFields& f) { return moments(f, kUnits).sigma_x; }

}  // namespace

TEST_CASE("collapse of a uniform prior is the Gaussian window") {
  const Grid g = Grid::line(1024, -10, 10);
  MadelungFields flat(g, std::vector<double>(g.size(), 1.0), std::vector<double>(g.size(), 0.3));
  const double sm = 5 * g.dx();
  const auto out = collapse_position(flat, {0.0, 0.0}, sm);
  const auto window = gaussian_amplitude(g, {0.0, 0.0}, sm);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(out.R[i] == doctest::Approx(window.values[i]).epsilon(1e-12));
    CHECK(out.S[i] == 0.3);
  }
  CHECK(norm_of(out) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("collapsing twice narrows the packet by 1/sqrt(2)") {
  const Grid g = Grid::line(2048, -20, 20);
  MadelungFields flat(g, std::vector<double>(g.size(), 1.0), std::vector<double>(g.size(), 0.0));
  const double sm = 0.5;
  const auto once = collapse_position(flat, {1.0, 0.0}, sm);
  const auto twice = collapse_position(once, {1.0, 0.0}, sm);
  CHECK(width_of(once) == doctest::Approx(sm).epsilon(1e-10));
  CHECK(width_of(twice) / width_of(once) == doctest::Approx(1.0 / std::numbers::sqrt2).epsilon(1e-10));
}

TEST_CASE("collapse keeps positivity and normalization") {
  const Grid g = Grid::line(512, -8, 8);
  const auto f = gaussian_fields(g, GaussianPacket{{0.5, 0}, 1.3, {2.0, 0}, 0.4});
  for (double sm : {2 * g.dx(), 0.1, 1.0}) {
    const auto out = collapse_position(f, {-0.7, 0.0}, sm);
    for (double r : out.R) CHECK(r >= 0.0);
    CHECK(norm_of(out) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(out.S == f.S);
  }
}

TEST_CASE("collapse contract errors") {
  const Grid g = Grid::line(512, -8, 8);
  const auto bump = cosine_bump(g, {-4.0, 0.0}, 1.0);
  MadelungFields f(g, bump.values, std::vector<double>(g.size(), 0.0));
  CHECK(error_code_of([&] { collapse_position(f, {4.0, 0.0}, 0.1); }) == ErrorCode::ZeroOverlap);
  CHECK(error_code_of([&] { collapse_position(f, {-4.0, 0.0}, g.dx()); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("sample_measurement: narrow bump, determinism, two bumps") {
  const Grid g = Grid::line(1024, -10, 10);
  auto one = cosine_bump(g, {2.5, 0.0}, 1.5 * g.dx());
  for (auto& v : one.values) v *= v;
  for (std::uint64_t s = 0; s < 20; ++s) CHECK(std::abs(sample_measurement(one, s)[0] - 2.5) <= g.dx());

  auto rho = cosine_bump(g, {-5.0, 0.0}, 1.0);
  const auto right = cosine_bump(g, {5.0, 0.0}, 1.0);
  for (std::size_t i = 0; i < g.size(); ++i) rho.values[i] = 0.5 * (rho.values[i] * rho.values[i] + right.values[i] * right.values[i]);
  CHECK(sample_measurement(rho, 42) == sample_measurement(rho, 42));
  int left = 0;
  const int draws = 10000;
  for (int k = 0; k < draws; ++k) left += sample_measurement(rho, 1000 + k)[0] < 0.0;
  CHECK(std::abs(left / double(draws) - 0.5) < 0.02);

  CHECK(error_code_of([&] { sample_measurement(ScalarField(g), 1); }) == ErrorCode::ZeroDensity);
}

TEST_CASE("sample_measurement: Born histogram passes chi-square on 32 bins") {
  const Grid g = Grid::line(1024, -8, 8);
  const double s = 1.1;
  const auto r = gaussian_amplitude(g, {0.3, 0.0}, s);
  ScalarField rho(g);
  for (std::size_t i = 0; i < g.size(); ++i) rho.values[i] = r.values[i] * r.values[i];

  const int bins = 32;
  const double lo = 0.3 - 4 * s, hi = 0.3 + 4 * s;
  std::vector<double> observed(bins, 0.0);
  const int draws = 100000;
  for (int k = 0; k < draws; ++k) {
    const double x = sample_measurement(rho, 7 + static_cast<std::uint64_t>(k))[0];
    const int b = std::clamp(static_cast<int>((x - lo) / (hi - lo) * (bins - 2)) + 1, 0, bins - 1);
    observed[b] += 1;
  }
  // Outer bins collect the tails beyond 4 sigma.
  double chi2 = 0.0;
  for (int b = 0; b < bins; ++b) {
    const double a = b == 0 ? -1e300 : lo + (b - 1) * (hi - lo) / (bins - 2);
    const double z = b == bins - 1 ? 1e300 : lo + b * (hi - lo) / (bins - 2);
    const double p = oracle::normal_cdf(z, 0.3, s) - oracle::normal_cdf(a, 0.3, s);
    const double expected = p * draws;
    chi2 += (observed[b] - expected) * (observed[b] - expected) / expected;
  }
  CHECK(chi2 < oracle::kChi2_31_99);
}

TEST_CASE("momentum from two positions") {
  const PhysicalConstants c{1.0, 1.0};
  CHECK(momentum_from_positions(0.0, 0.0, 2.0, 1.0, c) == 2.0);
  CHECK(momentum_from_positions(1.5, 0.2, 1.5, 0.9, c) == 0.0);
  CHECK(momentum_from_positions(0.0, 0.0, 2.0, 1.0, PhysicalConstants{1.0, 3.0}) == 6.0);
  CHECK(error_code_of([&] { momentum_from_positions(0, 1, 1, 1, c); }) == ErrorCode::DegenerateInterval);
  CHECK(error_code_of([&] { momentum_from_positions(0, 1, 1, 0.5, c); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("pure and mixed expectations agree on a disjoint basis") {
  const Grid g = Grid::line(1024, -10, 10);
  const ScalarField x(g, g.coords(0));
  PositiveBasis basis{{cosine_bump(g, {-3, 0}, 1.5), cosine_bump(g, {4, 0}, 2.0)}, {0.5, 0.5}};
  const auto r = pure_vs_mixed_expectation(basis, x);
  CHECK(std::abs(r.difference) < 1e-12);
  CHECK(std::abs(r.pure - r.mixed) < 1e-12);
  CHECK(r.mixed == doctest::Approx(0.5).epsilon(1e-10));

  PositiveBasis single{{gaussian_amplitude(g, {1, 0}, 0.7)}, {1.0}};
  const auto s = pure_vs_mixed_expectation(single, x);
  CHECK(s.pure == s.mixed);
  CHECK(s.difference == 0.0);
}

TEST_CASE("overlapping states violate the basis and differ") {
  const Grid g = Grid::line(1024, -10, 10);
  const ScalarField x(g, g.coords(0));
  PositiveBasis basis{{cosine_bump(g, {-0.5, 0}, 2.0), cosine_bump(g, {1.0, 0}, 2.0)}, {0.5, 0.5}};
  CHECK(error_code_of([&] { pure_vs_mixed_expectation(basis, x); }) == ErrorCode::BasisViolation);
  CHECK(error_code_of([&] { validate_basis(basis); }) == ErrorCode::BasisViolation);
  const auto r = pure_vs_mixed_unchecked(basis, x);
  CHECK(std::abs(r.difference) > 1e-3);
  CHECK(r.pure - r.mixed == doctest::Approx(r.difference).epsilon(1e-10));

  PositiveBasis heavy{{cosine_bump(g, {-3, 0}, 1.5), cosine_bump(g, {4, 0}, 2.0)}, {0.7, 0.7}};
  CHECK(error_code_of([&] { validate_basis(heavy); }) == ErrorCode::BasisViolation);
}

TEST_CASE("exchange term") {
  const Grid g = Grid::line(512, -16, 16);
  const auto a = cosine_bump(g, {-5, 0}, 2.0);
  const auto b = cosine_bump(g, {5, 0}, 2.0);
  const auto disjoint = exchange_term_max(a, b, true);
  CHECK(disjoint.max == 0.0);
  REQUIRE(disjoint.field.has_value());
  CHECK(disjoint.field->size() == g.size() * g.size());
  for (double v : *disjoint.field) CHECK(v == 0.0);

  double peak = 0.0;
  for (double v : a.values) peak = std::max(peak, v * v);
  CHECK(exchange_term_max(a, a).max == doctest::Approx(2 * peak * peak).epsilon(1e-14));

  // R with standard deviation sigma: R = exp(-x^2 / 2 sigma^2), so rho has sigma / sqrt(2).
  const double s = 1.0;
  const auto ga = gaussian_amplitude(g, {-4 * s, 0}, s / std::numbers::sqrt2);
  const auto gb = gaussian_amplitude(g, {4 * s, 0}, s / std::numbers::sqrt2);
  const auto tail = exchange_term_max(ga, gb, true);
  CHECK(tail.max < 1e-12);
  CHECK(tail.max > 0.0);
  double field_max = 0.0;
  for (double v : *tail.field) field_max = std::max(field_max, v);
  CHECK(field_max == doctest::Approx(tail.max).epsilon(1e-12));
}
