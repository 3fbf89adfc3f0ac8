#include "wavemech/states.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "wavemech/error.hpp"

namespace wavemech {

namespace {

double gaussian_envelope(const Grid& grid, const Point& x, const GaussianPacket& p) {
  double r2 = 0.0;
  for (int a = 0; a < grid.dim(); ++a) r2 += (x[a] - p.center[a]) * (x[a] - p.center[a]);
  const double pref = std::pow(2.0 * std::numbers::pi * p.sigma * p.sigma, -0.25 * grid.dim());
  return pref * std::exp(-r2 / (4.0 * p.sigma * p.sigma));
}

double gaussian_action(const Grid& grid, const Point& x, const GaussianPacket& p) {
  double s = 0.0;
  double r2 = 0.0;
  for (int a = 0; a < grid.dim(); ++a) {
    const double d = x[a] - p.center[a];
    s += p.momentum[a] * d;
    r2 += d * d;
  }
  return s - 0.5 * p.chirp * r2;
}

void check_packet(const GaussianPacket& p) {
  if (!(p.sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "packet sigma must be positive");
}

std::vector<std::vector<double>> read_rows(const std::string& path, std::size_t columns) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<std::vector<double>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError, path + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
    }
    if (row.size() != columns) {
      throw Error(ErrorCode::ParseError, path + ":" + std::to_string(lineno) + ": expected " +
                                             std::to_string(columns) + " columns");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void check_coordinates(const Grid& grid, const std::vector<std::vector<double>>& rows,
                       const std::string& path) {
  if (rows.size() != grid.size()) {
    throw Error(ErrorCode::ParseError, path + ": expected " + std::to_string(grid.size()) + " rows");
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Point p = grid.point(i);
    for (int a = 0; a < grid.dim(); ++a) {
      if (std::abs(rows[i][a] - p[a]) > 1e-6 * grid.dx(a)) {
        throw Error(ErrorCode::ParseError, path + ": row " + std::to_string(i + 2) +
                                               " coordinates do not match the grid");
      }
    }
  }
}

}  // namespace

WaveFunction gaussian_wave(const Grid& grid, const GaussianPacket& packet, const PhysicalConstants& c) {
  check_packet(packet);
  c.validate();
  WaveFunction psi(grid);
  for (std::size_t i = 0; i < psi.values.size(); ++i) {
    const Point x = grid.point(i);
    psi.values[i] = std::polar(gaussian_envelope(grid, x, packet), gaussian_action(grid, x, packet) / c.hbar);
  }
  return psi;
}

MadelungFields gaussian_fields(const Grid& grid, const GaussianPacket& packet) {
  check_packet(packet);
  MadelungFields f(grid);
  for (std::size_t i = 0; i < f.R.size(); ++i) {
    const Point x = grid.point(i);
    f.R[i] = gaussian_envelope(grid, x, packet);
    f.S[i] = gaussian_action(grid, x, packet);
  }
  if (grid.periodic()) {
    for (int a = 0; a < grid.dim(); ++a) f.action_jump[a] = packet.momentum[a] * grid.length(a);
  }
  return f;
}

WaveFunction vortex_wave(const Grid& grid, int winding, double r0, Point center) {
  if (grid.dim() != 2) throw Error(ErrorCode::InvalidArgument, "vortex states need a 2D grid");
  if (!(r0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "vortex radius must be positive");
  const double m = std::abs(winding);
  WaveFunction psi(grid);
  for (std::size_t i = 0; i < psi.values.size(); ++i) {
    const Point x = grid.point(i);
    const double dx = x[0] - center[0];
    const double dy = x[1] - center[1];
    const double r = std::hypot(dx, dy) / r0;
    const double amp = winding == 0 ? std::exp(-0.25 * r * r)
                                    : std::pow(r, m) * std::exp(0.5 * m * (1.0 - r * r));
    psi.values[i] = std::polar(amp, winding * std::atan2(dy, dx));
  }
  normalize(psi);
  return psi;
}

ScalarField cosine_bump(const Grid& grid, Point center, double half_width) {
  if (!(half_width > 0.0)) throw Error(ErrorCode::InvalidArgument, "bump half width must be positive");
  ScalarField R(grid);
  for (std::size_t i = 0; i < R.values.size(); ++i) {
    const Point x = grid.point(i);
    double v = 1.0;
    for (int a = 0; a < grid.dim(); ++a) {
      const double u = (x[a] - center[a]) / half_width;
      const double cs = std::cos(0.5 * std::numbers::pi * u);
      v *= std::abs(u) < 1.0 ? cs * cs : 0.0;
    }
    R.values[i] = v;
  }
  normalize(R);
  return R;
}

ScalarField gaussian_amplitude(const Grid& grid, Point center, double sigma) {
  GaussianPacket p{center, sigma, {0.0, 0.0}, 0.0};
  check_packet(p);
  ScalarField R(grid);
  for (std::size_t i = 0; i < R.values.size(); ++i) R.values[i] = gaussian_envelope(grid, grid.point(i), p);
  return R;
}

void normalize(WaveFunction& psi) {
  const double n = psi.norm();
  if (!(n > 0.0)) throw Error(ErrorCode::ZeroNorm, "cannot normalize a zero wave function");
  const double s = 1.0 / std::sqrt(n);
  for (auto& z : psi.values) z *= s;
}

void normalize(ScalarField& R) {
  double n = 0.0;
  for (double r : R.values) n += r * r;
  n *= R.grid.cell_volume();
  if (!(n > 0.0)) throw Error(ErrorCode::ZeroNorm, "cannot normalize a zero amplitude");
  const double s = 1.0 / std::sqrt(n);
  for (auto& r : R.values) r *= s;
}

WaveFunction read_wave_table(const Grid& grid, const std::string& path) {
  const auto d = static_cast<std::size_t>(grid.dim());
  const auto rows = read_rows(path, d + 2);
  check_coordinates(grid, rows, path);
  WaveFunction psi(grid);
  for (std::size_t i = 0; i < rows.size(); ++i) psi.values[i] = {rows[i][d], rows[i][d + 1]};
  if (!psi.finite()) throw Error(ErrorCode::ParseError, path + ": non-finite samples");
  return psi;
}

ScalarField read_scalar_table(const Grid& grid, const std::string& path) {
  const auto d = static_cast<std::size_t>(grid.dim());
  const auto rows = read_rows(path, d + 1);
  check_coordinates(grid, rows, path);
  ScalarField f(grid);
  for (std::size_t i = 0; i < rows.size(); ++i) f.values[i] = rows[i][d];
  return f;
}

}  // namespace wavemech
