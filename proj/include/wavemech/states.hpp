#pragma once

#include <string>

#include "wavemech/fields.hpp"

namespace wavemech {

/// Gaussian packet. `sigma` is the standard deviation of rho = |psi|^2 along each
/// axis; the action is S = p.(x - x0) - chirp |x - x0|^2 / 2.
struct GaussianPacket {
  Point center{0.0, 0.0};
  double sigma = 1.0;
  Point momentum{0.0, 0.0};
  double chirp = 0.0;

  bool operator==(const GaussianPacket&) const = default;
};

WaveFunction gaussian_wave(const Grid& grid, const GaussianPacket& packet, const PhysicalConstants& c);

/// Same packet built directly in Madelung form. On periodic grids the action jump
/// is p_a * L_a, so S = p.x is represented without wrapping.
MadelungFields gaussian_fields(const Grid& grid, const GaussianPacket& packet);

/// psi = f(r) exp(i n phi) with |psi| peaking on the circle r = r0.
WaveFunction vortex_wave(const Grid& grid, int winding, double r0, Point center = {0.0, 0.0});

/// Compactly supported cos^2 bump on |x - center| < half_width (per axis product in 2D),
/// normalized so that the integral of R^2 is 1.
ScalarField cosine_bump(const Grid& grid, Point center, double half_width);

/// Normalized Gaussian amplitude R with rho = R^2 of standard deviation sigma.
ScalarField gaussian_amplitude(const Grid& grid, Point center, double sigma);

void normalize(WaveFunction& psi);
void normalize(ScalarField& R);

/// Reads a tabulated wave function (columns x[,y],re,im; header line required).
WaveFunction read_wave_table(const Grid& grid, const std::string& path);
/// Reads a tabulated potential (columns x[,y],V; header line required).
ScalarField read_scalar_table(const Grid& grid, const std::string& path);

}  // namespace wavemech
