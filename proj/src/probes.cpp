#include "wavemech/probes.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "wavemech/error.hpp"
#include "wavemech/statistics.hpp"
#include "wavemech/trajectories.hpp"

namespace wavemech {

double ProbeResult::max_metric() const {
  return metric.empty() ? 0.0 : *std::max_element(metric.begin(), metric.end());
}

double ProbeResult::min_metric() const {
  return metric.empty() ? 0.0 : *std::min_element(metric.begin(), metric.end());
}

namespace {

double l2(const Grid& g, std::span<const cplx> f) {
  double s = 0.0;
  for (const auto& z : f) s += std::norm(z);
  return std::sqrt(s * g.cell_volume());
}

double l2(const Grid& g, std::span<const double> f) {
  double s = 0.0;
  for (double x : f) s += x * x;
  return std::sqrt(s * g.cell_volume());
}

struct Trace {
  std::vector<double> t;
  std::vector<WaveFunction> psi;
};

Trace run_trace(const WaveFunction& initial, const Potential& v, const PhysicalConstants& c,
                const EvolverConfig& cfg) {
  Trace out;
  const Observer keep = [&](const Snapshot& s) {
    out.t.push_back(s.t);
    if (const auto* psi = std::get_if<WaveFunction>(&s.state)) {
      out.psi.push_back(*psi);
    } else {
      out.psi.push_back(recompose(std::get<MadelungFields>(s.state), c));
    }
  };
  evolve(initial, v, c, cfg, std::span<const Observer>(&keep, 1));
  return out;
}

}  // namespace

void check_node_free(const WaveFunction& psi1, const WaveFunction& psi2, cplx c1, cplx c2) {
  if (!(psi1.grid == psi2.grid)) throw Error(ErrorCode::InvalidArgument, "components must share a grid");
  const double a1 = std::abs(c1);
  const double a2 = std::abs(c2);
  for (std::size_t i = 0; i < psi1.values.size(); ++i) {
    const double second = a2 * std::abs(psi2.values[i]);
    if (second > 0.0 && !(a1 * std::abs(psi1.values[i]) > second)) {
      const Point p = psi1.grid.point(i);
      throw Error(ErrorCode::NodeInSuperposition,
                  "|c1| R1 <= |c2| R2 at x=" + std::to_string(p[0]) + "; the sum may have a node");
    }
  }
}

ProbeResult superposition_violation(const WaveFunction& psi1, const WaveFunction& psi2, cplx c1, cplx c2,
                                    const Potential& v, const PhysicalConstants& c, const EvolverConfig& cfg) {
  check_node_free(psi1, psi2, c1, c2);
  const Grid& g = psi1.grid;
  WaveFunction sum(g);
  for (std::size_t i = 0; i < sum.values.size(); ++i) sum.values[i] = c1 * psi1.values[i] + c2 * psi2.values[i];

  const Trace whole = run_trace(sum, v, c, cfg);
  const Trace first = run_trace(psi1, v, c, cfg);
  // A vanishing second component contributes nothing; skipping it also avoids
  // decomposing an all-zero field.
  const bool second_active = c2 != cplx{0.0, 0.0};
  const Trace second = second_active ? run_trace(psi2, v, c, cfg) : Trace{};

  ProbeResult r;
  r.name = "superposition_violation";
  std::vector<cplx> diff(sum.values.size());
  for (std::size_t k = 0; k < whole.t.size(); ++k) {
    for (std::size_t i = 0; i < diff.size(); ++i) {
      cplx parts = c1 * first.psi[k].values[i];
      if (second_active) parts += c2 * second.psi[k].values[i];
      diff[i] = whole.psi[k].values[i] - parts;
    }
    r.t.push_back(whole.t[k]);
    r.metric.push_back(l2(g, diff) / l2(g, whole.psi[k].values));
  }
  const double worst = r.max_metric();
  if (worst < 1e-6) {
    r.verdict = "LINEAR";
    r.threshold = 1e-6;
  } else if (worst > 1e-2) {
    r.verdict = "NONLINEAR";
    r.threshold = 1e-2;
  } else {
    r.verdict = "INCONCLUSIVE";
    r.threshold = 1e-2;
  }
  return r;
}

std::vector<std::vector<double>> evolve_amplitude(const ScalarField& r, std::span<const ActionFrame> frames,
                                                  const PhysicalConstants& c, double cfl_safety) {
  c.validate();
  if (frames.empty()) throw Error(ErrorCode::InvalidArgument, "no action frames");
  const Grid& g = r.grid;
  for (const auto& f : frames) {
    if (f.S.size() != g.size()) throw Error(ErrorCode::InvalidArgument, "action frame does not match grid");
  }
  struct Derived {
    std::array<std::vector<double>, 2> grad;
    std::vector<double> lap;
  };
  auto derive = [&](const ActionFrame& f) {
    return Derived{gradients(g, f.S, f.jump), laplacian(g, f.S, f.jump)};
  };

  std::vector<std::vector<double>> out;
  std::vector<double> R = r.values;
  out.push_back(R);
  if (frames.size() == 1) return out;

  const double inv_m = 1.0 / c.mass;
  const std::size_t size = R.size();
  Derived lo = derive(frames[0]);
  for (std::size_t f = 1; f < frames.size(); ++f) {
    Derived hi = derive(frames[f]);
    const double span_t = frames[f].t - frames[f - 1].t;
    if (!(span_t > 0.0)) throw Error(ErrorCode::InvalidArgument, "frame times must increase");
    double vmax = 0.0;
    for (const Derived* d : {&lo, &hi}) {
      for (std::size_t i = 0; i < size; ++i) {
        double v2 = d->grad[0][i] * d->grad[0][i];
        if (g.dim() == 2) v2 += d->grad[1][i] * d->grad[1][i];
        vmax = std::max(vmax, std::sqrt(v2) * inv_m);
      }
    }
    const double speed = std::max(vmax, c.hbar * inv_m / g.min_dx());
    const double limit = cfl_safety * g.min_dx() / speed;
    const auto steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(span_t / limit - 1e-12)));
    const double h = span_t / static_cast<double>(steps);

    // RHS at fraction w of the way from frame f-1 to frame f.
    auto rhs = [&](const std::vector<double>& amp, double w, std::vector<double>& dr) {
      const auto grad_r = gradients(g, amp);
      dr.resize(size);
      for (std::size_t i = 0; i < size; ++i) {
        double adv = 0.0;
        for (int a = 0; a < g.dim(); ++a) {
          adv += grad_r[a][i] * ((1.0 - w) * lo.grad[a][i] + w * hi.grad[a][i]);
        }
        const double lap = (1.0 - w) * lo.lap[i] + w * hi.lap[i];
        dr[i] = -(adv + 0.5 * amp[i] * lap) * inv_m;
      }
    };
    std::vector<double> k1, k2, k3, k4, tmp(size);
    for (std::size_t s = 0; s < steps; ++s) {
      const double w0 = static_cast<double>(s) / static_cast<double>(steps);
      const double wh = (static_cast<double>(s) + 0.5) / static_cast<double>(steps);
      const double w1 = static_cast<double>(s + 1) / static_cast<double>(steps);
      rhs(R, w0, k1);
      for (std::size_t i = 0; i < size; ++i) tmp[i] = R[i] + 0.5 * h * k1[i];
      rhs(tmp, wh, k2);
      for (std::size_t i = 0; i < size; ++i) tmp[i] = R[i] + 0.5 * h * k2[i];
      rhs(tmp, wh, k3);
      for (std::size_t i = 0; i < size; ++i) tmp[i] = R[i] + h * k3[i];
      rhs(tmp, w1, k4);
      for (std::size_t i = 0; i < size; ++i) R[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out.push_back(R);
    lo = std::move(hi);
  }
  return out;
}

ProbeResult r_linearity_defect(const ScalarField& ra, const ScalarField& rb, double alpha, double beta,
                               std::span<const ActionFrame> frames, const PhysicalConstants& c) {
  if (!(ra.grid == rb.grid)) throw Error(ErrorCode::InvalidArgument, "amplitudes must share a grid");
  if (!(alpha >= 0.0) || !(beta >= 0.0)) throw Error(ErrorCode::InvalidArgument, "alpha and beta must be >= 0");
  ScalarField mix(ra.grid);
  for (std::size_t i = 0; i < mix.values.size(); ++i) mix.values[i] = alpha * ra.values[i] + beta * rb.values[i];
  if (std::any_of(mix.values.begin(), mix.values.end(), [](double v) { return !(v >= 0.0); })) {
    throw Error(ErrorCode::InvalidArgument, "alpha Ra + beta Rb must be nonnegative");
  }
  const auto ea = evolve_amplitude(ra, frames, c);
  const auto eb = evolve_amplitude(rb, frames, c);
  const auto em = evolve_amplitude(mix, frames, c);

  ProbeResult r;
  r.name = "r_linearity";
  r.threshold = 1e-10;
  std::vector<double> diff(mix.values.size());
  for (std::size_t k = 0; k < em.size(); ++k) {
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = em[k][i] - alpha * ea[k][i] - beta * eb[k][i];
    r.t.push_back(frames[k].t);
    r.metric.push_back(l2(ra.grid, diff));
  }
  r.verdict = r.max_metric() < r.threshold ? "LINEAR" : "NONLINEAR";
  return r;
}

ProbeResult r_linearity_contrast(const ScalarField& ra, const ScalarField& rb, double alpha, double beta,
                                 std::span<const double> s0, const AxisJumps& jump, const Potential& v,
                                 const PhysicalConstants& c, const EvolverConfig& cfg) {
  if (!(ra.grid == rb.grid)) throw Error(ErrorCode::InvalidArgument, "amplitudes must share a grid");
  const Grid& g = ra.grid;
  auto wave = [&](const std::vector<double>& amp) {
    return recompose(MadelungFields(g, amp, std::vector<double>(s0.begin(), s0.end()), jump), c);
  };
  std::vector<double> mix(ra.values.size());
  for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = alpha * ra.values[i] + beta * rb.values[i];

  EvolverConfig linear = cfg;
  linear.kind = EvolverKind::Linear;
  const Trace ta = run_trace(wave(ra.values), v, c, linear);
  const Trace tb = run_trace(wave(rb.values), v, c, linear);
  const Trace tm = run_trace(wave(mix), v, c, linear);

  ProbeResult r;
  r.name = "r_linearity_contrast";
  r.threshold = 1e-3;
  std::vector<double> diff(mix.size());
  for (std::size_t k = 0; k < tm.t.size(); ++k) {
    for (std::size_t i = 0; i < diff.size(); ++i) {
      diff[i] = std::abs(tm.psi[k].values[i]) - alpha * std::abs(ta.psi[k].values[i]) -
                beta * std::abs(tb.psi[k].values[i]);
    }
    r.t.push_back(tm.t[k]);
    r.metric.push_back(l2(g, diff));
  }
  r.verdict = r.max_metric() > r.threshold ? "NONLINEAR" : "LINEAR";
  return r;
}

InterferenceReport interference_excess(const ScalarField& r1, std::span<const double> s1, const ScalarField& r2,
                                       std::span<const double> s2, EvolverKind kind, const PhysicalConstants& c) {
  if (!(r1.grid == r2.grid)) throw Error(ErrorCode::InvalidArgument, "states must share a grid");
  const std::size_t size = r1.values.size();
  if (s1.size() != size || s2.size() != size) throw Error(ErrorCode::InvalidArgument, "phase size mismatch");
  c.validate();
  InterferenceReport out;
  out.excess.resize(size);
  std::vector<double> total(size);
  double max1 = 0.0;
  double max2 = 0.0;
  for (std::size_t i = 0; i < size; ++i) {
    const double a = r1.values[i];
    const double b = r2.values[i];
    // Cross term of the combined density, written out so that the classical
    // case is exactly 2 R1 R2.
    out.excess[i] = kind == EvolverKind::Classical ? 2.0 * a * b : 2.0 * a * b * std::cos((s2[i] - s1[i]) / c.hbar);
    total[i] = a * a + b * b + out.excess[i];
    max1 = std::max(max1, a * a);
    max2 = std::max(max2, b * b);
  }
  out.min_excess = *std::min_element(out.excess.begin(), out.excess.end());
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < size; ++i) {
    const double a = r1.values[i];
    const double b = r2.values[i];
    if (a * a > 0.01 * max1 && b * b > 0.01 * max2) {
      ++out.window_samples;
      lo = std::min(lo, total[i]);
      hi = std::max(hi, total[i]);
    }
  }
  if (out.window_samples > 0 && hi + lo > 0.0) out.visibility = (hi - lo) / (hi + lo);
  return out;
}

ProbeResult ehrenfest_probe(std::span<const DiagnosticsRecord> records, const PhysicalConstants& c,
                            double threshold) {
  const auto series = ehrenfest_residuals(records, c);
  ProbeResult r;
  r.name = "ehrenfest";
  r.threshold = threshold;
  r.t = series.t;
  for (std::size_t i = 0; i < series.t.size(); ++i) r.metric.push_back(std::max(series.r1[i], series.r2[i]));
  r.verdict = r.max_metric() < threshold ? "PASS" : "FAIL";
  return r;
}

ProbeResult uncertainty_probe(std::span<const DiagnosticsRecord> records, const PhysicalConstants& c,
                              double tolerance) {
  ProbeResult r;
  r.name = "uncertainty";
  r.threshold = 0.5 * c.hbar;
  for (const auto& rec : records) {
    r.t.push_back(rec.t);
    r.metric.push_back(rec.sigma_x * rec.sigma_p);
  }
  r.verdict = r.min_metric() >= r.threshold * (1.0 - tolerance) ? "ABOVE_BOUND" : "BELOW_BOUND";
  return r;
}

IndirectMomentum indirect_momentum(const MadelungFields& initial, const Potential& v, const PhysicalConstants& c,
                                   double sigma_m, double gap, std::size_t cycles, std::uint64_t seed,
                                   double dt, double cfl_safety) {
  c.validate();
  if (cycles == 0) throw Error(ErrorCode::InvalidArgument, "need at least one cycle");
  if (gap == 0.0) throw Error(ErrorCode::DegenerateInterval, "measurement interval is zero");
  if (!(gap > 0.0)) throw Error(ErrorCode::InvalidArgument, "measurement interval must be positive");
  const Grid& g = initial.grid;
  const ScalarField rho0(g, initial.rho());

  IndirectMomentum out;
  out.budget = c.mass * sigma_m / gap;
  const auto grad = gradient(g, initial.S, 0, initial.action_jump);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < grad.size(); ++i) {
    num += rho0.values[i] * grad[i];
    den += rho0.values[i];
  }
  out.expected = num / den;

  EvolverConfig cfg;
  cfg.kind = EvolverKind::Classical;
  cfg.dt = dt;
  cfg.t_end = gap;
  cfg.cfl_safety = cfl_safety;
  cfg.snapshot_stride = std::numeric_limits<std::size_t>::max();
  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k < cycles; ++k) {
    const std::uint64_t first_seed = rng();
    const std::uint64_t second_seed = rng();
    const Point x1 = sample_measurement(rho0, first_seed);
    const auto collapsed = collapse_position(initial, x1, sigma_m);
    const auto evolved = evolve(collapsed, v, c, cfg);
    const auto& fields = std::get<MadelungFields>(evolved.final_state);
    const Point x2 = sample_measurement(ScalarField(g, fields.rho()), second_seed);
    double shift = x2[0] - x1[0];
    // Positions come back wrapped on periodic grids; take the shortest displacement.
    if (g.periodic()) shift = std::remainder(shift, g.length(0));
    out.estimates.push_back(momentum_from_positions(0.0, 0.0, shift, gap, c));
  }
  double s = 0.0;
  for (double p : out.estimates) s += p;
  out.mean = s / static_cast<double>(cycles);
  return out;
}

}  // namespace wavemech
