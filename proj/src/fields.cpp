#include "wavemech/fields.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wavemech/error.hpp"

namespace wavemech {

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::remainder(a, two_pi);  // [-pi, pi]
  return a <= -std::numbers::pi ? a + two_pi : a;
}

MadelungFields::MadelungFields(Grid g)
    : grid(std::move(g)), R(grid.size(), 0.0), S(grid.size(), 0.0), node(grid.size(), 0) {}

MadelungFields::MadelungFields(Grid g, std::vector<double> r, std::vector<double> s, AxisJumps jump)
    : grid(std::move(g)), R(std::move(r)), S(std::move(s)), node(grid.size(), 0), action_jump(jump) {
  if (R.size() != grid.size() || S.size() != grid.size()) {
    throw Error(ErrorCode::InvalidArgument, "Madelung field sizes do not match grid");
  }
  if (std::any_of(R.begin(), R.end(), [](double r) { return !(r >= 0.0); })) {
    throw Error(ErrorCode::InvalidArgument, "amplitude R must be nonnegative");
  }
  if (!grid.periodic()) action_jump = {0.0, 0.0};
}

std::vector<double> MadelungFields::rho() const {
  std::vector<double> out(R.size());
  std::transform(R.begin(), R.end(), out.begin(), [](double r) { return r * r; });
  return out;
}

std::size_t MadelungFields::node_count() const {
  return static_cast<std::size_t>(std::count(node.begin(), node.end(), std::uint8_t{1}));
}

bool MadelungFields::finite() const {
  auto ok = [](double v) { return std::isfinite(v); };
  return std::all_of(R.begin(), R.end(), ok) && std::all_of(S.begin(), S.end(), ok);
}

const Grid& grid_of(const State& state) {
  return std::visit([](const auto& s) -> const Grid& { return s.grid; }, state);
}

namespace {

struct Unwrapper {
  const std::vector<double>& phase;
  const std::vector<std::uint8_t>& node;
  double hbar;

  // S at `flat`, continuing from a neighbour whose action is `prev`.
  double next(double prev, std::size_t flat) const {
    if (node[flat]) return prev;
    return prev + hbar * wrap_angle(phase[flat] - prev / hbar);
  }

  // Fills S along a line through `start` (already set) in both directions.
  void line(std::vector<double>& S, std::size_t offset, std::size_t stride, std::size_t n,
            std::size_t start) const {
    for (std::size_t i = start + 1; i < n; ++i) {
      S[offset + i * stride] = next(S[offset + (i - 1) * stride], offset + i * stride);
    }
    for (std::size_t i = start; i-- > 0;) {
      S[offset + i * stride] = next(S[offset + (i + 1) * stride], offset + i * stride);
    }
  }

  double period_jump(const std::vector<double>& S, std::size_t offset, std::size_t stride,
                     std::size_t n) const {
    const double beyond = next(S[offset + (n - 1) * stride], offset);
    return beyond - S[offset];
  }
};

}  // namespace

MadelungFields decompose(const WaveFunction& psi, const PhysicalConstants& c, double node_eps) {
  c.validate();
  if (!psi.finite()) throw Error(ErrorCode::InvalidArgument, "wave function has non-finite samples");
  const Grid& g = psi.grid;
  const std::size_t size = g.size();
  MadelungFields out(g);
  std::vector<double> phase(size);
  for (std::size_t i = 0; i < size; ++i) {
    out.R[i] = std::abs(psi.values[i]);
    phase[i] = std::arg(psi.values[i]);
  }
  const auto max_it = std::max_element(out.R.begin(), out.R.end());
  const double max_r = *max_it;
  if (!(max_r > 0.0)) throw Error(ErrorCode::AllZeroField, "max |psi| is zero");
  for (std::size_t i = 0; i < size; ++i) out.node[i] = out.R[i] < node_eps * max_r ? 1 : 0;

  const auto seed = static_cast<std::size_t>(max_it - out.R.begin());
  const auto s = g.unravel(seed);
  const std::size_t n = g.n();
  const Unwrapper uw{phase, out.node, c.hbar};
  out.S[seed] = c.hbar * phase[seed];

  if (g.dim() == 1) {
    uw.line(out.S, 0, 1, n, s[0]);
    if (g.periodic()) out.action_jump[0] = uw.period_jump(out.S, 0, 1, n);
    return out;
  }
  // Axis 0 through the seed column, then axis 1 from every sample of that column.
  uw.line(out.S, s[1], n, n, s[0]);
  for (std::size_t i0 = 0; i0 < n; ++i0) uw.line(out.S, i0 * n, 1, n, s[1]);
  if (g.periodic()) {
    out.action_jump[0] = uw.period_jump(out.S, s[1], n, n);
    out.action_jump[1] = uw.period_jump(out.S, s[0] * n, 1, n);
  }
  return out;
}

WaveFunction recompose(const MadelungFields& fields, const PhysicalConstants& c) {
  c.validate();
  WaveFunction psi(fields.grid);
  for (std::size_t i = 0; i < psi.values.size(); ++i) {
    psi.values[i] = std::polar(fields.R[i], fields.S[i] / c.hbar);
  }
  return psi;
}

QuantumPotential quantum_potential(const ScalarField& R, const PhysicalConstants& c, double reg_eps) {
  c.validate();
  if (std::any_of(R.values.begin(), R.values.end(), [](double r) { return !(r >= 0.0); })) {
    throw Error(ErrorCode::InvalidArgument, "amplitude R must be nonnegative");
  }
  const double max_r = R.max();
  if (!(max_r > 0.0)) throw Error(ErrorCode::AllZeroField, "max R is zero");
  const auto lap = laplacian(R.grid, R.values);
  const double pref = -c.hbar * c.hbar / (2.0 * c.mass);
  QuantumPotential out{ScalarField(R.grid), std::vector<std::uint8_t>(R.values.size(), 0), 0};
  for (std::size_t i = 0; i < lap.size(); ++i) {
    if (R.values[i] < reg_eps * max_r) {
      out.regularized[i] = 1;
      ++out.regularized_count;
    } else {
      out.Q.values[i] = pref * lap[i] / R.values[i];
    }
  }
  return out;
}

Winding winding_circulation(const MadelungFields& fields, std::span<const std::size_t> loop,
                            const PhysicalConstants& c) {
  c.validate();
  if (loop.size() < 3) throw Error(ErrorCode::InvalidArgument, "loop needs at least 3 samples");
  for (auto idx : loop) {
    if (idx >= fields.grid.size()) throw Error(ErrorCode::InvalidArgument, "loop index out of range");
    if (fields.node[idx]) throw Error(ErrorCode::LoopThroughNode, "loop passes through a node sample");
  }
  Winding w;
  for (std::size_t k = 0; k < loop.size(); ++k) {
    const double a = fields.S[loop[k]];
    const double b = fields.S[loop[(k + 1) % loop.size()]];
    w.circulation += c.hbar * wrap_angle((b - a) / c.hbar);
  }
  const double turns = w.circulation / (2.0 * std::numbers::pi * c.hbar);
  w.n = std::lround(turns);
  w.residual = std::abs(turns - static_cast<double>(w.n));
  return w;
}

std::vector<std::size_t> circular_loop(const Grid& grid, Point center, double radius) {
  if (grid.dim() != 2) throw Error(ErrorCode::InvalidArgument, "circular loops need a 2D grid");
  if (!(radius > grid.min_dx())) throw Error(ErrorCode::InvalidArgument, "loop radius below grid spacing");
  const auto samples = static_cast<std::size_t>(
      std::ceil(4.0 * std::numbers::pi * radius / grid.min_dx()));
  std::vector<std::size_t> loop;
  loop.reserve(samples);
  for (std::size_t j = 0; j < samples; ++j) {
    const double th = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(samples);
    const auto idx = grid.nearest_flat({center[0] + radius * std::cos(th),
                                        center[1] + radius * std::sin(th)});
    if (loop.empty() || loop.back() != idx) loop.push_back(idx);
  }
  while (loop.size() > 1 && loop.back() == loop.front()) loop.pop_back();
  return loop;
}

}  // namespace wavemech
