#pragma once

// Closed-form reference solutions, coded independently of the library.

#include <cmath>
#include <numbers>

namespace oracle {

// Free packet whose density has standard deviation sigma0 at t = 0.
inline double free_width(double sigma0, double t, double hbar = 1.0, double m = 1.0) {
  const double s = hbar * t / (2.0 * m * sigma0 * sigma0);
  return sigma0 * std::sqrt(1.0 + s * s);
}

// Q for R = exp(-x^2 / 4 s^2), i.e. a density of standard deviation s.
inline double gaussian_q(double x, double s, double hbar = 1.0, double m = 1.0) {
  return -(hbar * hbar / (2.0 * m)) * (x * x / (4.0 * std::pow(s, 4)) - 1.0 / (2.0 * s * s));
}

// Q for R = cos(kx) + 2.
inline double cosine_q(double x, double k, double hbar = 1.0, double m = 1.0) {
  return (hbar * hbar * k * k / (2.0 * m)) * std::cos(k * x) / (std::cos(k * x) + 2.0);
}

inline double oscillator_x(double x0, double p0, double omega, double t, double m = 1.0) {
  return x0 * std::cos(omega * t) + p0 / (m * omega) * std::sin(omega * t);
}

// Normal density, used to check samplers.
inline double normal_cdf(double x, double mu, double s) {
  return 0.5 * std::erfc(-(x - mu) / (s * std::numbers::sqrt2));
}

// Upper 1% point of chi^2 with 31 degrees of freedom.
inline constexpr double kChi2_31_99 = 52.191;

}  // namespace oracle
