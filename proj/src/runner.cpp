#include "wavemech/runner.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "wavemech/statistics.hpp"

namespace wavemech {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

#ifndef WAVEMECH_VERSION
#define WAVEMECH_VERSION "0.0.0"
#endif

std::string_view version() { return WAVEMECH_VERSION; }

std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Completed: return "completed";
    case RunStatus::Caustic: return "caustic";
    case RunStatus::Blowup: return "blowup";
    case RunStatus::Failed: return "failed";
    case RunStatus::ConfigError: return "config_error";
    case RunStatus::IoError: return "io_error";
  }
  return "failed";
}

int exit_code(RunStatus s) {
  switch (s) {
    case RunStatus::Completed: return 0;
    case RunStatus::ConfigError: return 2;
    case RunStatus::IoError: return 4;
    default: return 3;
  }
}

namespace {

std::string now_utc() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void put(std::string& out, double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  out += buf;
}

// Writes through a temporary sibling and renames, so readers never see a torn file.
void write_atomic(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::IoError, "cannot open " + tmp.string() + " for writing");
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    f.flush();
    if (!f) throw Error(ErrorCode::IoError, "write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot rename " + tmp.string() + ": " + ec.message());
}

void emit(const fs::path& dir, const std::string& rel, const std::string& text, std::vector<OutputFile>& files) {
  const fs::path p = dir / rel;
  write_atomic(p, text);
  files.push_back({rel, text.size(), sha256_file(p.string())});
}

MadelungFields as_fields(const State& s, const PhysicalConstants& c) {
  if (const auto* f = std::get_if<MadelungFields>(&s)) return *f;
  return decompose(std::get<WaveFunction>(s), c);
}

std::string diagnostics_csv(const std::vector<DiagnosticsRecord>& records) {
  std::string out = "t,norm,energy,mean_x,mean_p,sigma_x,sigma_p,ehrenfest1,ehrenfest2,node_count,min_rho\n";
  for (const auto& r : records) {
    for (double x : {r.t, r.norm, r.energy, r.mean_x, r.mean_p, r.sigma_x, r.sigma_p, r.ehrenfest1, r.ehrenfest2}) {
      put(out, x);
      out += ',';
    }
    out += std::to_string(r.node_count);
    out += ',';
    put(out, r.min_rho);
    out += '\n';
  }
  return out;
}

std::string field_csv(const State& s, const Potential& v, const PhysicalConstants& c) {
  const MadelungFields f = as_fields(s, c);
  const Grid& g = f.grid;
  const auto q = quantum_potential(f.amplitude(), c);
  const auto vv = v.values(g, c);
  std::string out = g.dim() == 1 ? "x,rho,R,S,Q,V\n" : "x,y,rho,R,S,Q,V\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point x = g.point(i);
    for (int a = 0; a < g.dim(); ++a) {
      put(out, x[a]);
      out += ',';
    }
    for (double val : {f.R[i] * f.R[i], f.R[i], f.S[i], q.Q.values[i]}) {
      put(out, val);
      out += ',';
    }
    put(out, vv[i]);
    out += '\n';
  }
  return out;
}

std::string trajectories_csv(const std::vector<TrajectoryEnsemble>& ensembles) {
  if (ensembles.empty()) return {};
  const int dim = ensembles.front().dim;
  std::string out = dim == 1 ? "traj_id,t,x,vx,valid\n" : "traj_id,t,x,y,vx,vy,valid\n";
  for (const auto& e : ensembles) {
    for (std::size_t k = 0; k < e.count(); ++k) {
      out += std::to_string(k);
      out += ',';
      put(out, e.t);
      for (int a = 0; a < dim; ++a) {
        out += ',';
        put(out, e.positions[k][a]);
      }
      for (int a = 0; a < dim; ++a) {
        out += ',';
        put(out, e.velocities[k][a]);
      }
      out += e.valid[k] ? ",1\n" : ",0\n";
    }
  }
  return out;
}

std::string probes_csv(const std::vector<ProbeResult>& probes) {
  std::string out = "probe,t,metric,threshold,verdict\n";
  for (const auto& p : probes) {
    for (std::size_t i = 0; i < p.t.size(); ++i) {
      out += p.name;
      out += ',';
      put(out, p.t[i]);
      out += ',';
      put(out, p.metric[i]);
      out += ',';
      put(out, p.threshold);
      out += ',';
      out += p.verdict;
      out += '\n';
    }
  }
  return out;
}

ProbeResult single(const std::string& name, double t, double metric, double threshold, std::string verdict) {
  return ProbeResult{name, {t}, {metric}, threshold, std::move(verdict)};
}

// Everything probes may need from the main run.
struct RunContext {
  const ExperimentConfig& cfg;
  const Grid& grid;
  const Potential& v;
  const State& initial;
  const State& final_state;
  const std::vector<DiagnosticsRecord>& all_records;
  const std::vector<DiagnosticsRecord>& records;
  const std::vector<ActionFrame>& frames;
  std::optional<std::uint64_t> seed;
};

void run_probe(const ProbeSpec& p, const RunContext& ctx, std::vector<ProbeResult>& out) {
  const auto& cfg = ctx.cfg;
  const auto& c = cfg.physics;
  const Grid& g = ctx.grid;
  const auto& st = cfg.initial_state;

  if (p.name == "ehrenfest") {
    out.push_back(ehrenfest_probe(ctx.all_records, c, p.threshold.value_or(1e-3)));
  } else if (p.name == "uncertainty") {
    out.push_back(uncertainty_probe(ctx.records, c, p.threshold.value_or(1e-2)));
  } else if (p.name == "superposition_violation") {
    const auto [psi1, psi2] = build_components(cfg, g);
    auto r = superposition_violation(psi1, psi2, st.c1, st.c2, ctx.v, c, cfg.evolver_config());
    if (p.threshold) {
      r.threshold = *p.threshold;
      r.verdict = r.max_metric() < r.threshold ? "LINEAR" : "NONLINEAR";
    }
    out.push_back(std::move(r));
  } else if (p.name == "r_linearity") {
    const double alpha = p.param("alpha", 1.0);
    const double beta = p.param("beta", 1.0);
    const auto ra = gaussian_amplitude(g, {p.param("ra_center", -1.0), 0.0}, p.param("ra_sigma", 1.0));
    const auto rb = gaussian_amplitude(g, {p.param("rb_center", 1.0), 0.0}, p.param("rb_sigma", 1.0));
    out.push_back(r_linearity_defect(ra, rb, alpha, beta, ctx.frames, c));
    if (p.param("contrast", 1.0) != 0.0) {
      // The linear evolver is spectral; run the contrast on the periodic copy of the grid.
      GridSpec spec = cfg.grid;
      spec.boundary = Boundary::Periodic;
      const Grid pg = spec.build();
      const auto s0 = as_fields(build_initial_state(cfg, pg), c);
      const auto pa = gaussian_amplitude(pg, {p.param("ra_center", -1.0), 0.0}, p.param("ra_sigma", 1.0));
      const auto pb = gaussian_amplitude(pg, {p.param("rb_center", 1.0), 0.0}, p.param("rb_sigma", 1.0));
      out.push_back(r_linearity_contrast(pa, pb, alpha, beta, s0.S, s0.action_jump, build_potential(cfg, pg), c,
                                         cfg.evolver_config()));
    }
  } else if (p.name == "interference") {
    auto component = [&](const GaussianPacket& pk, cplx w) {
      MadelungFields f = gaussian_fields(g, pk);
      for (auto& r : f.R) r *= std::abs(w);
      for (auto& s : f.S) s += c.hbar * std::arg(w);
      return f;
    };
    const auto f1 = component(st.first, st.c1);
    const auto f2 = component(st.second, st.c2);
    const auto rep = interference_excess(f1.amplitude(), f1.S, f2.amplitude(), f2.S, cfg.evolver.kind, c);
    out.push_back(single("interference[min_excess]", 0.0, rep.min_excess, 0.0,
                         rep.min_excess >= 0.0 ? "CONSTRUCTIVE" : "DESTRUCTIVE"));
    const double thr = p.threshold.value_or(0.9);
    out.push_back(single("interference[visibility]", 0.0, rep.visibility, thr,
                         rep.visibility > thr ? "FRINGES" : "NO_FRINGES"));
  } else if (p.name == "pure_vs_mixed") {
    const double hw = p.param("half_width", 1.5);
    const double w1 = p.param("w1", 0.5);
    const double c1 = p.param("center1", -3.0);
    const double c2 = p.param("center2", 3.0);
    ScalarField ax(g, g.coords(0));
    ScalarField ax2 = ax;
    for (auto& x : ax2.values) x *= x;
    const double thr = p.threshold.value_or(1e-12);
    PositiveBasis basis{{cosine_bump(g, {c1, 0.0}, hw), cosine_bump(g, {c2, 0.0}, hw)}, {w1, 1.0 - w1}};
    for (const auto& [tag, a] : {std::pair{"x", &ax}, std::pair{"x2", &ax2}}) {
      const auto pm = pure_vs_mixed_expectation(basis, *a);
      const double d = std::abs(pm.pure - pm.mixed);
      out.push_back(single(std::string("pure_vs_mixed[") + tag + "]", 0.0, d, thr, d < thr ? "EQUAL" : "DIFFERENT"));
    }
    // Shifting the second bump into the first breaks disjointness.
    PositiveBasis overlap{{basis.states[0], cosine_bump(g, {c1 + hw, 0.0}, hw)}, basis.weights};
    const double d = std::abs(pure_vs_mixed_unchecked(overlap, ax).difference);
    std::string verdict = "ACCEPTED";
    try {
      validate_basis(overlap);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::BasisViolation) throw;
      verdict = "BASIS_VIOLATION";
    }
    out.push_back(single("pure_vs_mixed[overlap]", 0.0, d, thr, verdict));
  } else if (p.name == "exchange_term") {
    const double sigma = p.param("sigma", 0.5);
    const double lo = g.bounds(0).min;
    const double len = g.length(0);
    const auto d = exchange_term_max(cosine_bump(g, {lo + 0.3 * len, 0.0}, 0.1 * len),
                                     cosine_bump(g, {lo + 0.7 * len, 0.0}, 0.1 * len));
    out.push_back(single("exchange_term[disjoint]", 0.0, d.max, 0.0, d.max == 0.0 ? "ZERO" : "NONZERO"));
    // sigma is the width of R itself, i.e. rho has standard deviation sigma / sqrt 2.
    const double mid = lo + 0.5 * len;
    const auto e = exchange_term_max(gaussian_amplitude(g, {mid - 4.0 * sigma, 0.0}, sigma / std::numbers::sqrt2),
                                     gaussian_amplitude(g, {mid + 4.0 * sigma, 0.0}, sigma / std::numbers::sqrt2));
    const double thr = p.threshold.value_or(1e-12);
    out.push_back(single("exchange_term[gaussian]", 0.0, e.max, thr, e.max < thr ? "NEGLIGIBLE" : "SIGNIFICANT"));
  } else if (p.name == "winding") {
    const auto f = as_fields(ctx.final_state, c);
    const auto loop = circular_loop(g, st.center, p.param("radius", st.r0));
    const auto w = winding_circulation(f, loop, c);
    const double thr = p.threshold.value_or(1e-9);
    const double t = ctx.records.empty() ? 0.0 : ctx.records.back().t;
    out.push_back(single("winding", t, w.circulation / (2.0 * std::numbers::pi * c.hbar), thr,
                         w.residual < thr ? "n=" + std::to_string(w.n) : "NON_INTEGER"));
  } else if (p.name == "indirect_momentum") {
    const double gap = p.param("gap", 1.0);
    const auto seed = ctx.seed.value_or(static_cast<std::uint64_t>(p.param("seed", 1.0)));
    const auto im = indirect_momentum(as_fields(ctx.initial, c), ctx.v, c, p.param("sigma_m", 2.0 * g.min_dx()),
                                      gap, static_cast<std::size_t>(p.param("cycles", 100.0)), seed, cfg.time.dt,
                                      cfg.evolver.cfl_safety);
    ProbeResult est{"indirect_momentum[estimate]", {}, {}, im.expected, "SAMPLE"};
    for (double e : im.estimates) {
      est.t.push_back(gap);
      est.metric.push_back(e);
    }
    out.push_back(std::move(est));
    out.push_back(single("indirect_momentum[mean]", gap, im.mean, im.expected, "ESTIMATE"));
    const double err = std::abs(im.mean - im.expected);
    const double budget = p.threshold.value_or(im.budget);
    out.push_back(single("indirect_momentum[error]", gap, err, budget, err <= budget ? "WITHIN_BUDGET" : "OUTSIDE_BUDGET"));
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown probe " + p.name);
  }
}

// Files from an earlier run in the same directory would otherwise linger.
void clear_outputs(const fs::path& dir) {
  std::error_code ec;
  for (const char* f : {"diagnostics.csv", "trajectories.csv", "probes.csv", "manifest.json"}) fs::remove(dir / f, ec);
  fs::remove_all(dir / "fields", ec);
}

std::string out_dir_for(const ExperimentConfig& cfg, const RunOptions& opts) {
  if (opts.out_dir) return *opts.out_dir;
  return cfg.output_dir.empty() ? "out/" + (cfg.scenario.empty() ? std::string("run") : cfg.scenario)
                                : cfg.output_dir;
}

}  // namespace

std::string sha256_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot read " + path);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (f.read(buf, sizeof buf) || f.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(f.gcount()));
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  char b[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(b, sizeof b, "%02x", md[i]);
    hex += b;
  }
  return hex;
}

void emit_outputs(const ExperimentConfig& cfg, const Potential& v, const RunData& data, const std::string& dir,
                  std::vector<OutputFile>& files) {
  const fs::path d(dir);
  std::error_code ec;
  fs::create_directories(d, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir + ": " + ec.message());

  emit(d, "diagnostics.csv", diagnostics_csv(data.records), files);
  if (cfg.write_fields && !data.snapshots.empty()) {
    fs::create_directories(d / "fields", ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + (d / "fields").string() + ": " + ec.message());
    for (std::size_t k = 0; k < data.snapshots.size(); ++k) {
      char name[32];
      std::snprintf(name, sizeof name, "fields/field_%05zu.csv", k);
      emit(d, name, field_csv(data.snapshots[k], v, cfg.physics), files);
    }
  }
  if (!data.ensembles.empty()) emit(d, "trajectories.csv", trajectories_csv(data.ensembles), files);
  if (!data.probes.empty()) emit(d, "probes.csv", probes_csv(data.probes), files);
}

void write_manifest(const RunManifest& m, const std::string& dir) {
  json j;
  j["version"] = m.version;
  j["status"] = to_string(m.status);
  j["exit_code"] = exit_code(m.status);
  j["message"] = m.message;
  j["started"] = m.started;
  j["finished"] = m.finished;
  if (m.caustic) {
    const auto& r = *m.caustic;
    j["caustic"] = {{"time", r.time},
                    {"metric", r.metric == CausticMetric::Compression ? "compression" : "negative_density"},
                    {"value", r.value},
                    {"location", {r.location[0], r.location[1]}}};
  }
  json files = json::array();
  for (const auto& f : m.files) files.push_back({{"path", f.path}, {"bytes", f.bytes}, {"sha256", f.sha256}});
  j["files"] = files;
  try {
    j["config"] = json::parse(serialize_config(m.config));
  } catch (const std::exception&) {
    j["config"] = nullptr;
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  write_atomic(fs::path(dir) / "manifest.json", j.dump(2) + "\n");
}

RunManifest run(ExperimentConfig cfg, const RunOptions& opts) {
  RunManifest m;
  m.version = std::string(version());
  m.started = now_utc();
  if (opts.seed && cfg.trajectories) cfg.trajectories->seed = *opts.seed;
  m.out_dir = out_dir_for(cfg, opts);
  m.config = cfg;

  RunData data;
  std::optional<Potential> v;
  try {
    validate(cfg);
    const Grid grid = cfg.grid.build();
    v = build_potential(cfg, grid);
    const State initial = build_initial_state(cfg, grid);
    const auto& c = cfg.physics;
    EvolverConfig ecfg = cfg.evolver_config();
    ecfg.snapshot_stride = 1;  // observe every step; the stride only thins what is written
    const std::size_t stride = cfg.time.snapshot_stride;

    const bool want_frames = std::any_of(cfg.probes.begin(), cfg.probes.end(),
                                         [](const ProbeSpec& p) { return p.name == "r_linearity"; });
    std::vector<DiagnosticsRecord> all;
    std::vector<std::size_t> steps;
    std::vector<ActionFrame> frames;
    std::optional<State> last_state;
    std::optional<TrajectoryEnsemble> ens;
    std::optional<FieldFrame> prev_frame;
    std::size_t last_step = 0;

    const Observer observe = [&](const Snapshot& s) {
      all.push_back(s.record);
      steps.push_back(s.step);
      last_step = s.step;
      const bool keep = s.step % stride == 0;
      if (want_frames) {
        const auto& f = std::get<MadelungFields>(s.state);
        frames.push_back({s.t, f.S, f.action_jump});
      }
      if (cfg.trajectories) {
        FieldFrame frame{s.t, VelocityField(as_fields(s.state, c), c)};
        if (!ens) {
          ens = sample_ensemble(ScalarField(grid, as_fields(s.state, c).rho()), cfg.trajectories->count,
                                cfg.trajectories->seed);
          for (std::size_t k = 0; k < ens->count(); ++k) {
            try {
              ens->velocities[k] = frame.velocity.at(ens->positions[k]);
            } catch (const Error& e) {
              if (e.code() != ErrorCode::NodeRegion) throw;
              ens->valid[k] = 0;
            }
          }
        } else {
          const std::array<FieldFrame, 2> pair{*prev_frame, frame};
          ens = advance(*ens, pair, s.t - prev_frame->t);
        }
        prev_frame = std::move(frame);
        if (keep) data.ensembles.push_back(*ens);
      }
      if (keep) data.snapshots.push_back(s.state);
      last_state = s.state;
    };

    std::string failure;
    try {
      evolve(initial, *v, c, ecfg, std::span<const Observer>(&observe, 1));
    } catch (const CausticError& e) {
      m.status = RunStatus::Caustic;
      m.caustic = e.report();
      failure = e.what();
    } catch (const Error& e) {
      m.status = e.code() == ErrorCode::NumericalBlowup ? RunStatus::Blowup : RunStatus::Failed;
      failure = e.what();
    }

    // The last observed state is a snapshot even when it is off the stride.
    if (!all.empty() && last_step % stride != 0) {
      data.snapshots.push_back(*last_state);
      if (ens) data.ensembles.push_back(*ens);
    }
    if (all.size() >= 3) attach_ehrenfest(all, c);
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (steps[i] % stride == 0 || i + 1 == all.size()) data.records.push_back(all[i]);
    }

    if (m.status == RunStatus::Completed) {
      const RunContext ctx{cfg, grid, *v, initial, *last_state, all, data.records, frames, opts.seed};
      for (const auto& p : cfg.probes) run_probe(p, ctx, data.probes);
    } else {
      m.message = failure;
    }
  } catch (const ConfigError& e) {
    m.status = RunStatus::ConfigError;
    m.message = e.what();  // already lists every issue
  } catch (const Error& e) {
    m.status = e.code() == ErrorCode::IoError ? RunStatus::IoError
               : e.code() == ErrorCode::NumericalBlowup ? RunStatus::Blowup
                                                         : RunStatus::Failed;
    m.message = e.what();
  } catch (const std::exception& e) {
    m.status = RunStatus::Failed;
    m.message = e.what();
  }

  clear_outputs(m.out_dir);
  if (m.status != RunStatus::ConfigError && v) {
    // Partial results are still written after a numerical failure.
    try {
      emit_outputs(cfg, *v, data, m.out_dir, m.files);
    } catch (const Error& e) {
      m.status = RunStatus::IoError;
      m.message = e.what();
    }
  }
  m.finished = now_utc();
  try {
    write_manifest(m, m.out_dir);
  } catch (const Error& e) {
    m.status = RunStatus::IoError;
    m.message = e.what();
  }
  return m;
}

RunManifest run_file(const std::string& path, const RunOptions& opts) {
  try {
    return run(load_config(path), opts);
  } catch (const ConfigError& e) {
    RunManifest m;
    m.version = std::string(version());
    m.started = m.finished = now_utc();
    m.status = RunStatus::ConfigError;
    m.message = e.what();  // already lists every issue
    if (opts.out_dir) {
      m.out_dir = *opts.out_dir;
      try {
        write_manifest(m, m.out_dir);
      } catch (const Error&) {
      }
    }
    return m;
  } catch (const Error& e) {
    RunManifest m;
    m.version = std::string(version());
    m.started = m.finished = now_utc();
    m.status = e.code() == ErrorCode::IoError ? RunStatus::IoError : RunStatus::ConfigError;
    m.message = e.what();
    return m;
  }
}

}  // namespace wavemech
