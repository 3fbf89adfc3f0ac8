#include "wavemech/spectral.hpp"

#include <fftw3.h>

#include <memory>
#include <mutex>
#include <numbers>
#include <utility>

#include "wavemech/error.hpp"

namespace wavemech {

namespace {

// The FFTW planner is not thread-safe; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::vector<double> fft_wavenumbers(std::size_t n, double length) {
  std::vector<double> k(n);
  const double dk = 2.0 * std::numbers::pi / length;
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = static_cast<double>(i);
    k[i] = (i <= n / 2 ? j : j - static_cast<double>(n)) * dk;
  }
  return k;
}

template <typename T>
void fd_gradient_line(const T* f, T* out, std::size_t n, std::size_t stride, double dx) {
  const double h2 = 2.0 * dx;
  out[0] = (-3.0 * f[0] + 4.0 * f[stride] - f[2 * stride]) / h2;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    out[i * stride] = (f[(i + 1) * stride] - f[(i - 1) * stride]) / h2;
  }
  const std::size_t l = (n - 1) * stride;
  out[l] = (3.0 * f[l] - 4.0 * f[l - stride] + f[l - 2 * stride]) / h2;
}

template <typename T>
void fd_laplacian_line_add(const T* f, T* out, std::size_t n, std::size_t stride, double dx) {
  const double inv = 1.0 / (dx * dx);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    out[i * stride] += (f[(i + 1) * stride] - 2.0 * f[i * stride] + f[(i - 1) * stride]) * inv;
  }
  // Edge samples reuse the nearest interior second difference (exact on quadratics).
  out[0] += (f[0] - 2.0 * f[stride] + f[2 * stride]) * inv;
  const std::size_t l = (n - 1) * stride;
  out[l] += (f[l] - 2.0 * f[l - stride] + f[l - 2 * stride]) * inv;
}

// Calls fn(offset, stride) for each grid line along `axis`.
template <typename Fn>
void for_each_line(const Grid& grid, int axis, Fn&& fn) {
  const std::size_t n = grid.n();
  if (grid.dim() == 1) {
    fn(std::size_t{0}, std::size_t{1});
    return;
  }
  if (axis == 0) {
    for (std::size_t j = 0; j < n; ++j) fn(j, n);
  } else {
    for (std::size_t i = 0; i < n; ++i) fn(i * n, std::size_t{1});
  }
}

template <typename T>
std::vector<T> fd_gradient(const Grid& grid, std::span<const T> f, int axis) {
  std::vector<T> out(f.size());
  const double dx = grid.dx(axis);
  for_each_line(grid, axis, [&](std::size_t off, std::size_t stride) {
    fd_gradient_line(f.data() + off, out.data() + off, grid.n(), stride, dx);
  });
  return out;
}

template <typename T>
std::vector<T> fd_laplacian(const Grid& grid, std::span<const T> f) {
  std::vector<T> out(f.size(), T{});
  for (int axis = 0; axis < grid.dim(); ++axis) {
    const double dx = grid.dx(axis);
    for_each_line(grid, axis, [&](std::size_t off, std::size_t stride) {
      fd_laplacian_line_add(f.data() + off, out.data() + off, grid.n(), stride, dx);
    });
  }
  return out;
}

void check_size(const Grid& grid, std::size_t size) {
  if (size != grid.size()) {
    throw Error(ErrorCode::InvalidArgument, "field size does not match grid");
  }
}

// Multiplies spectrum by (i k_axis), zeroing the Nyquist column of that axis.
void apply_ik(FourierTransform& ft, std::vector<cplx>& spec, int axis) {
  const Grid& g = ft.grid();
  const auto k = ft.wavenumbers(axis);
  const std::size_t n = g.n();
  const std::size_t nyq = (n % 2 == 0) ? n / 2 : n;
  for (std::size_t flat = 0; flat < spec.size(); ++flat) {
    const std::size_t i = g.unravel(flat)[axis];
    spec[flat] = (i == nyq) ? cplx{} : spec[flat] * cplx(0.0, k[i]);
  }
}

std::vector<double> real_part(const std::vector<cplx>& z) {
  std::vector<double> r(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) r[i] = z[i].real();
  return r;
}

std::vector<cplx> to_complex(std::span<const double> f) {
  return std::vector<cplx>(f.begin(), f.end());
}

}  // namespace

FourierTransform::FourierTransform(const Grid& grid) : grid_(grid) {
  for (int a = 0; a < grid.dim(); ++a) k_[a] = fft_wavenumbers(grid.n(), grid.length(a));
  const auto size = grid.size();
  std::lock_guard lock(planner_mutex());
  auto* buf = fftw_alloc_complex(size);
  buffer_ = buf;
  const int n = static_cast<int>(grid.n());
  // FFTW_ESTIMATE keeps plan selection deterministic between runs.
  if (grid.dim() == 1) {
    forward_plan_ = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    inverse_plan_ = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  } else {
    forward_plan_ = fftw_plan_dft_2d(n, n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    inverse_plan_ = fftw_plan_dft_2d(n, n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
}

FourierTransform::~FourierTransform() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
  fftw_free(buffer_);
}

void FourierTransform::forward(std::span<const cplx> in, std::span<cplx> out) {
  auto* buf = static_cast<fftw_complex*>(buffer_);
  auto* z = reinterpret_cast<cplx*>(buf);
  std::copy(in.begin(), in.end(), z);
  fftw_execute(static_cast<fftw_plan>(forward_plan_));
  std::copy(z, z + in.size(), out.begin());
}

void FourierTransform::inverse(std::span<const cplx> in, std::span<cplx> out) {
  auto* buf = static_cast<fftw_complex*>(buffer_);
  auto* z = reinterpret_cast<cplx*>(buf);
  std::copy(in.begin(), in.end(), z);
  fftw_execute(static_cast<fftw_plan>(inverse_plan_));
  const double scale = 1.0 / static_cast<double>(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = z[i] * scale;
}

FourierTransform& fourier(const Grid& grid) {
  thread_local std::vector<std::pair<Grid, std::unique_ptr<FourierTransform>>> cache;
  for (auto& [g, ft] : cache) {
    if (g == grid) return *ft;
  }
  cache.emplace_back(grid, std::make_unique<FourierTransform>(grid));
  return *cache.back().second;
}

std::vector<double> remove_ramp(const Grid& grid, std::span<const double> f, const AxisJumps& jump) {
  std::vector<double> g(f.begin(), f.end());
  if (jump[0] == 0.0 && jump[1] == 0.0) return g;
  for (std::size_t flat = 0; flat < g.size(); ++flat) {
    const auto idx = grid.unravel(flat);
    for (int a = 0; a < grid.dim(); ++a) {
      g[flat] -= jump[a] * static_cast<double>(idx[a]) / static_cast<double>(grid.n());
    }
  }
  return g;
}

std::array<std::vector<double>, 2> gradients(const Grid& grid, std::span<const double> f,
                                             const AxisJumps& jump) {
  check_size(grid, f.size());
  std::array<std::vector<double>, 2> out;
  if (!grid.periodic()) {
    for (int a = 0; a < grid.dim(); ++a) out[a] = fd_gradient(grid, f, a);
    return out;
  }
  auto& ft = fourier(grid);
  const auto periodic_part = remove_ramp(grid, f, jump);
  std::vector<cplx> spec(f.size());
  ft.forward(to_complex(periodic_part), spec);
  std::vector<cplx> work(f.size());
  for (int a = 0; a < grid.dim(); ++a) {
    work = spec;
    apply_ik(ft, work, a);
    ft.inverse(work, work);
    out[a] = real_part(work);
    const double slope = jump[a] / grid.length(a);
    if (slope != 0.0) {
      for (auto& v : out[a]) v += slope;
    }
  }
  return out;
}

std::vector<double> gradient(const Grid& grid, std::span<const double> f, int axis,
                             const AxisJumps& jump) {
  if (!grid.periodic()) {
    check_size(grid, f.size());
    return fd_gradient(grid, f, axis);
  }
  return std::move(gradients(grid, f, jump)[axis]);
}

std::vector<double> laplacian(const Grid& grid, std::span<const double> f, const AxisJumps& jump) {
  check_size(grid, f.size());
  if (!grid.periodic()) return fd_laplacian(grid, f);
  auto& ft = fourier(grid);
  std::vector<cplx> spec(f.size());
  ft.forward(to_complex(remove_ramp(grid, f, jump)), spec);
  for (std::size_t flat = 0; flat < spec.size(); ++flat) {
    const auto idx = grid.unravel(flat);
    double k2 = 0.0;
    for (int a = 0; a < grid.dim(); ++a) {
      const double k = ft.wavenumbers(a)[idx[a]];
      k2 += k * k;
    }
    spec[flat] *= -k2;
  }
  ft.inverse(spec, spec);
  return real_part(spec);
}

std::vector<double> divergence(const Grid& grid, const std::array<std::vector<double>, 2>& flux) {
  std::vector<double> out(grid.size(), 0.0);
  if (!grid.periodic()) {
    for (int a = 0; a < grid.dim(); ++a) {
      const auto d = fd_gradient(grid, std::span<const double>(flux[a]), a);
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += d[i];
    }
    return out;
  }
  auto& ft = fourier(grid);
  std::vector<cplx> total(grid.size(), cplx{});
  std::vector<cplx> spec(grid.size());
  for (int a = 0; a < grid.dim(); ++a) {
    check_size(grid, flux[a].size());
    ft.forward(to_complex(flux[a]), spec);
    apply_ik(ft, spec, a);
    for (std::size_t i = 0; i < spec.size(); ++i) total[i] += spec[i];
  }
  ft.inverse(total, total);
  return real_part(total);
}

std::vector<cplx> gradient(const Grid& grid, std::span<const cplx> psi, int axis) {
  check_size(grid, psi.size());
  if (!grid.periodic()) return fd_gradient(grid, psi, axis);
  auto& ft = fourier(grid);
  std::vector<cplx> spec(psi.size());
  ft.forward(psi, spec);
  apply_ik(ft, spec, axis);
  ft.inverse(spec, spec);
  return spec;
}

std::vector<cplx> laplacian(const Grid& grid, std::span<const cplx> psi) {
  check_size(grid, psi.size());
  if (!grid.periodic()) return fd_laplacian(grid, psi);
  auto& ft = fourier(grid);
  std::vector<cplx> spec(psi.size());
  ft.forward(psi, spec);
  for (std::size_t flat = 0; flat < spec.size(); ++flat) {
    const auto idx = grid.unravel(flat);
    double k2 = 0.0;
    for (int a = 0; a < grid.dim(); ++a) {
      const double k = ft.wavenumbers(a)[idx[a]];
      k2 += k * k;
    }
    spec[flat] *= -k2;
  }
  ft.inverse(spec, spec);
  return spec;
}

}  // namespace wavemech
