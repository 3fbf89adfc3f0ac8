#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "wavemech/fields.hpp"

namespace wavemech {

/// R'(x) proportional to R(x) exp(-|x - x_m|^2 / 4 sigma_m^2), renormalized so the
/// integral of R'^2 is 1. S, node flags and the action jump are kept.
/// Requires sigma_m >= 2 dx; throws ZeroOverlap when rho(x_m) is zero or the
/// windowed norm underflows.
MadelungFields collapse_position(const MadelungFields& fields, const Point& x_m, double sigma_m);

/// One position drawn from rho with the trajectory sampler.
Point sample_measurement(const ScalarField& rho, std::uint64_t seed);

/// m (x2 - x1) / (t2 - t1). Throws DegenerateInterval when t2 == t1 and
/// InvalidArgument when t2 < t1.
double momentum_from_positions(double x1, double t1, double x2, double t2, const PhysicalConstants& c);

/// Nonnegative states with mixing weights. Valid bases have normalized states,
/// weights summing to one and samplewise-disjoint supports.
struct PositiveBasis {
  std::vector<ScalarField> states;
  std::vector<double> weights;
};

/// Throws BasisViolation naming the first failed invariant.
void validate_basis(const PositiveBasis& basis);

struct PureMixed {
  double pure = 0.0;
  double mixed = 0.0;
  double difference = 0.0;  // sum over i != j of sqrt(w_i w_j) int R_i R_j A
};

/// Expectation of the diagonal observable `a` in the pure state sum_i sqrt(w_i) R_i
/// and in the mixture. Validates the basis first.
PureMixed pure_vs_mixed_expectation(const PositiveBasis& basis, const ScalarField& a);

/// Same quadrature without the basis checks, for demonstrating what goes wrong
/// with overlapping states.
PureMixed pure_vs_mixed_unchecked(const PositiveBasis& basis, const ScalarField& a);

struct ExchangeTerm {
  double max = 0.0;
  std::optional<std::vector<double>> field;  // n x n, row-major in (x, y)
};

/// Maximum over the product grid of 2 R1(x) R2(x) R1(y) R2(y). Since the term
/// factorizes as 2 g(x) g(y) with g = R1 R2, the maximum is 2 (max g)^2.
ExchangeTerm exchange_term_max(const ScalarField& r1, const ScalarField& r2, bool with_field = false);

}  // namespace wavemech
