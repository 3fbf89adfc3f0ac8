#include "wavemech/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "wavemech/probes.hpp"

namespace wavemech {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

bool power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

template <typename E>
struct Names {
  std::vector<std::pair<E, const char*>> items;

  const char* name(E e) const {
    for (const auto& [k, v] : items) {
      if (k == e) return v;
    }
    return "?";
  }
  std::optional<E> find(const std::string& s) const {
    for (const auto& [k, v] : items) {
      if (s == v) return k;
    }
    return std::nullopt;
  }
  std::string choices() const {
    std::string out;
    for (const auto& [k, v] : items) out += (out.empty() ? "" : ", ") + std::string(v);
    return out;
  }
};

const Names<Boundary> kBoundaryNames{{{Boundary::Periodic, "periodic"}, {Boundary::AbsorbingPad, "absorbing_pad"}}};
const Names<PotentialKind> kPotentialNames{{{PotentialKind::Free, "free"},
                                            {PotentialKind::Harmonic, "harmonic"},
                                            {PotentialKind::Quartic, "quartic"},
                                            {PotentialKind::LinearTilt, "linear_tilt"},
                                            {PotentialKind::Tabulated, "tabulated"}}};
const Names<InitialKind> kInitialNames{{{InitialKind::Gaussian, "gaussian"},
                                        {InitialKind::TwoGaussian, "two_gaussian"},
                                        {InitialKind::Vortex, "vortex"},
                                        {InitialKind::Tabulated, "tabulated"}}};
const Names<EvolverKind> kEvolverNames{{{EvolverKind::Linear, "linear"}, {EvolverKind::Classical, "classical"}}};

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string index_path(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

// Walks a JSON document, recording type and key errors instead of stopping at
// the first one.
class Reader {
 public:
  explicit Reader(std::vector<std::string>& issues) : issues_(issues) {}

  void error(const std::string& path, const std::string& msg) { issues_.push_back(path + ": " + msg); }

  bool object(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) {
      error(path.empty() ? "<document>" : path, "expected an object");
      return false;
    }
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : j.items()) {
      if (!ok.contains(key)) error(join(path, key), "unknown key");
    }
    return true;
  }

  const json* child(const json& j, const char* key) {
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
  }

  void number(const json& j, const char* key, const std::string& path, double& out, bool required = false) {
    const json* v = child(j, key);
    if (v == nullptr) {
      if (required) error(join(path, key), "missing");
      return;
    }
    if (!v->is_number()) {
      error(join(path, key), "expected a number");
      return;
    }
    out = v->get<double>();
  }

  template <typename Int>
  void integer(const json& j, const char* key, const std::string& path, Int& out, bool required = false) {
    const json* v = child(j, key);
    if (v == nullptr) {
      if (required) error(join(path, key), "missing");
      return;
    }
    if (!v->is_number_integer()) {
      error(join(path, key), "expected an integer");
      return;
    }
    if constexpr (std::is_unsigned_v<Int>) {
      if (v->is_number_unsigned() || v->get<std::int64_t>() >= 0) {
        out = v->get<Int>();
      } else {
        error(join(path, key), "must be >= 0");
      }
    } else {
      out = v->get<Int>();
    }
  }

  void string(const json& j, const char* key, const std::string& path, std::string& out, bool required = false) {
    const json* v = child(j, key);
    if (v == nullptr) {
      if (required) error(join(path, key), "missing");
      return;
    }
    if (!v->is_string()) {
      error(join(path, key), "expected a string");
      return;
    }
    out = v->get<std::string>();
  }

  void boolean(const json& j, const char* key, const std::string& path, bool& out) {
    const json* v = child(j, key);
    if (v == nullptr) return;
    if (!v->is_boolean()) {
      error(join(path, key), "expected true or false");
      return;
    }
    out = v->get<bool>();
  }

  // Numeric array of length 1 or 2 into a Point.
  void point(const json& j, const char* key, const std::string& path, Point& out) {
    const json* v = child(j, key);
    if (v == nullptr) return;
    const std::string p = join(path, key);
    if (!v->is_array() || v->empty() || v->size() > 2) {
      error(p, "expected an array of 1 or 2 numbers");
      return;
    }
    out = {0.0, 0.0};
    for (std::size_t i = 0; i < v->size(); ++i) {
      if (!(*v)[i].is_number()) {
        error(index_path(p, i), "expected a number");
        continue;
      }
      out[i] = (*v)[i].get<double>();
    }
  }

  void complex(const json& j, const char* key, const std::string& path, cplx& out) {
    const json* v = child(j, key);
    if (v == nullptr) return;
    const std::string p = join(path, key);
    if (v->is_number()) {
      out = {v->get<double>(), 0.0};
      return;
    }
    if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number()) {
      error(p, "expected a number or [re, im]");
      return;
    }
    out = {(*v)[0].get<double>(), (*v)[1].get<double>()};
  }

  template <typename E>
  void choice(const json& j, const char* key, const std::string& path, const Names<E>& names, E& out,
              bool required = false) {
    std::string s;
    const json* v = child(j, key);
    if (v == nullptr) {
      if (required) error(join(path, key), "missing");
      return;
    }
    string(j, key, path, s);
    if (!v->is_string()) return;
    if (auto e = names.find(s)) {
      out = *e;
    } else {
      error(join(path, key), "'" + s + "' is not one of " + names.choices());
    }
  }

 private:
  std::vector<std::string>& issues_;
};

void read_packet(Reader& r, const json& j, const std::string& path, GaussianPacket& p) {
  if (!r.object(j, path, {"x0", "sigma", "p0", "chirp"})) return;
  r.point(j, "x0", path, p.center);
  r.number(j, "sigma", path, p.sigma, true);
  r.point(j, "p0", path, p.momentum);
  r.number(j, "chirp", path, p.chirp);
}

json packet_json(const GaussianPacket& p, int dim) {
  json j;
  auto arr = [dim](const Point& x) {
    json a = json::array();
    for (int i = 0; i < dim; ++i) a.push_back(x[i]);
    return a;
  };
  j["x0"] = arr(p.center);
  j["sigma"] = p.sigma;
  j["p0"] = arr(p.momentum);
  j["chirp"] = p.chirp;
  return j;
}

bool finite_all(std::initializer_list<double> xs) {
  return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

Grid GridSpec::build() const {
  if (dim == 1) return Grid::line(n, bounds[0].min, bounds[0].max, boundary);
  return Grid::square(n, bounds[0], bounds[1], boundary);
}

double ProbeSpec::param(const std::string& key, double fallback) const {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

EvolverConfig ExperimentConfig::evolver_config() const {
  EvolverConfig e;
  e.kind = evolver.kind;
  e.dt = time.dt;
  e.cfl_safety = evolver.cfl_safety;
  e.caustic_threshold = evolver.caustic_threshold;
  e.t_end = time.t_end;
  e.snapshot_stride = time.snapshot_stride;
  return e;
}

std::string ExperimentConfig::resolve(const std::string& path) const {
  const fs::path p(path);
  if (p.is_absolute() || base_dir.empty()) return p.string();
  return (fs::path(base_dir) / p).lexically_normal().string();
}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
  return scenario == o.scenario && description == o.description && grid == o.grid && physics == o.physics &&
         potential == o.potential && initial_state == o.initial_state && evolver == o.evolver &&
         time == o.time && trajectories == o.trajectories && probes == o.probes && output_dir == o.output_dir &&
         write_fields == o.write_fields;
}

ConfigError::ConfigError(ErrorCode code, std::vector<std::string> issues)
    : Error(code,
            [&] {
              std::string s;
              for (const auto& i : issues) s += (s.empty() ? "" : "; ") + i;
              return s;
            }()),
      issues_(std::move(issues)) {}

const std::vector<std::string>& known_probes() {
  static const std::vector<std::string> names{
      "ehrenfest",   "uncertainty",   "superposition_violation", "r_linearity",      "interference",
      "pure_vs_mixed", "exchange_term", "winding",               "indirect_momentum"};
  return names;
}

ExperimentConfig parse_config(std::string_view text, const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(ErrorCode::ParseError, {std::string("<document>: ") + e.what()});
  }
  std::vector<std::string> issues;
  Reader r(issues);
  ExperimentConfig cfg;
  cfg.base_dir = base_dir;
  if (!r.object(doc, "", {"scenario", "description", "grid", "physics", "potential", "initial_state", "evolver",
                          "time", "trajectories", "probes", "output"})) {
    throw ConfigError(ErrorCode::ValidationError, issues);
  }
  r.string(doc, "scenario", "", cfg.scenario, true);
  r.string(doc, "description", "", cfg.description);

  if (const json* g = r.child(doc, "grid")) {
    if (r.object(*g, "grid", {"dim", "n", "bounds", "boundary"})) {
      r.integer(*g, "dim", "grid", cfg.grid.dim, true);
      r.integer(*g, "n", "grid", cfg.grid.n, true);
      r.choice(*g, "boundary", "grid", kBoundaryNames, cfg.grid.boundary);
      if (const json* b = r.child(*g, "bounds")) {
        if (!b->is_array() || b->empty() || b->size() > 2) {
          r.error("grid.bounds", "expected one [min, max] pair per axis");
        } else {
          for (std::size_t a = 0; a < b->size(); ++a) {
            const json& pair = (*b)[a];
            if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
              r.error(index_path("grid.bounds", a), "expected [min, max]");
              continue;
            }
            cfg.grid.bounds[a] = {pair[0].get<double>(), pair[1].get<double>()};
          }
          if (b->size() == 1) cfg.grid.bounds[1] = cfg.grid.bounds[0];
          if (static_cast<int>(b->size()) != cfg.grid.dim) {
            r.error("grid.bounds", "needs exactly grid.dim pairs");
          }
        }
      } else {
        r.error("grid.bounds", "missing");
      }
    }
  } else {
    r.error("grid", "missing");
  }

  if (const json* p = r.child(doc, "physics")) {
    if (r.object(*p, "physics", {"hbar", "mass"})) {
      r.number(*p, "hbar", "physics", cfg.physics.hbar);
      r.number(*p, "mass", "physics", cfg.physics.mass);
    }
  }

  if (const json* p = r.child(doc, "potential")) {
    if (r.object(*p, "potential", {"kind", "omega", "lambda", "force", "file"})) {
      r.choice(*p, "kind", "potential", kPotentialNames, cfg.potential.kind, true);
      r.number(*p, "omega", "potential", cfg.potential.omega);
      r.number(*p, "lambda", "potential", cfg.potential.lambda);
      r.number(*p, "force", "potential", cfg.potential.force);
      r.string(*p, "file", "potential", cfg.potential.file);
    }
  }

  if (const json* s = r.child(doc, "initial_state")) {
    auto& st = cfg.initial_state;
    if (r.object(*s, "initial_state",
                 {"kind", "x0", "sigma", "p0", "chirp", "first", "second", "c1", "c2", "n", "r0", "center", "file"})) {
      r.choice(*s, "kind", "initial_state", kInitialNames, st.kind, true);
      switch (st.kind) {
        case InitialKind::Gaussian: {
          json packet = json::object();
          for (const char* k : {"x0", "sigma", "p0", "chirp"}) {
            if (s->contains(k)) packet[k] = (*s)[k];
          }
          read_packet(r, packet, "initial_state", st.first);
          for (const char* k : {"first", "second", "c1", "c2", "n", "r0", "center", "file"}) {
            if (s->contains(k)) r.error(join("initial_state", k), "not used by a gaussian state");
          }
          break;
        }
        case InitialKind::TwoGaussian:
          for (const char* k : {"x0", "sigma", "p0", "chirp", "n", "r0", "center", "file"}) {
            if (s->contains(k)) r.error(join("initial_state", k), "not used by a two_gaussian state");
          }
          if (const json* f = r.child(*s, "first")) {
            read_packet(r, *f, "initial_state.first", st.first);
          } else {
            r.error("initial_state.first", "missing");
          }
          if (const json* f = r.child(*s, "second")) {
            read_packet(r, *f, "initial_state.second", st.second);
          } else {
            r.error("initial_state.second", "missing");
          }
          r.complex(*s, "c1", "initial_state", st.c1);
          r.complex(*s, "c2", "initial_state", st.c2);
          break;
        case InitialKind::Vortex:
          for (const char* k : {"x0", "sigma", "p0", "chirp", "first", "second", "c1", "c2", "file"}) {
            if (s->contains(k)) r.error(join("initial_state", k), "not used by a vortex state");
          }
          r.integer(*s, "n", "initial_state", st.winding, true);
          r.number(*s, "r0", "initial_state", st.r0, true);
          r.point(*s, "center", "initial_state", st.center);
          break;
        case InitialKind::Tabulated:
          for (const char* k : {"x0", "sigma", "p0", "chirp", "first", "second", "c1", "c2", "n", "r0", "center"}) {
            if (s->contains(k)) r.error(join("initial_state", k), "not used by a tabulated state");
          }
          r.string(*s, "file", "initial_state", st.file, true);
          break;
      }
    }
  } else {
    r.error("initial_state", "missing");
  }

  if (const json* e = r.child(doc, "evolver")) {
    if (e->is_string()) {
      r.choice(doc, "evolver", "", kEvolverNames, cfg.evolver.kind);
    } else if (r.object(*e, "evolver", {"kind", "cfl_safety", "caustic_threshold"})) {
      r.choice(*e, "kind", "evolver", kEvolverNames, cfg.evolver.kind, true);
      r.number(*e, "cfl_safety", "evolver", cfg.evolver.cfl_safety);
      r.number(*e, "caustic_threshold", "evolver", cfg.evolver.caustic_threshold);
    }
  } else {
    r.error("evolver", "missing");
  }

  if (const json* t = r.child(doc, "time")) {
    if (r.object(*t, "time", {"dt", "t_end", "snapshot_stride"})) {
      r.number(*t, "dt", "time", cfg.time.dt, true);
      r.number(*t, "t_end", "time", cfg.time.t_end, true);
      r.integer(*t, "snapshot_stride", "time", cfg.time.snapshot_stride);
    }
  } else {
    r.error("time", "missing");
  }

  if (const json* t = r.child(doc, "trajectories")) {
    TrajectorySpec ts;
    if (r.object(*t, "trajectories", {"count", "seed"})) {
      r.integer(*t, "count", "trajectories", ts.count, true);
      r.integer(*t, "seed", "trajectories", ts.seed);
    }
    cfg.trajectories = ts;
  }

  if (const json* ps = r.child(doc, "probes")) {
    if (!ps->is_array()) {
      r.error("probes", "expected an array");
    } else {
      for (std::size_t i = 0; i < ps->size(); ++i) {
        const json& pj = (*ps)[i];
        const std::string path = index_path("probes", i);
        ProbeSpec spec;
        if (r.object(pj, path, {"name", "threshold", "params"})) {
          r.string(pj, "name", path, spec.name, true);
          if (const json* th = r.child(pj, "threshold")) {
            if (th->is_number()) {
              spec.threshold = th->get<double>();
            } else {
              r.error(join(path, "threshold"), "expected a number");
            }
          }
          if (const json* params = r.child(pj, "params")) {
            if (!params->is_object()) {
              r.error(join(path, "params"), "expected an object of numbers");
            } else {
              for (const auto& [k, v] : params->items()) {
                if (v.is_number()) {
                  spec.params[k] = v.get<double>();
                } else {
                  r.error(join(join(path, "params"), k), "expected a number");
                }
              }
            }
          }
        }
        cfg.probes.push_back(std::move(spec));
      }
    }
  }

  if (const json* o = r.child(doc, "output")) {
    if (r.object(*o, "output", {"directory", "fields"})) {
      r.string(*o, "directory", "output", cfg.output_dir);
      r.boolean(*o, "fields", "output", cfg.write_fields);
    }
  }

  // Semantic checks run on whatever parsed, so one pass reports everything.
  // A field with a structural problem is not reported twice.
  const auto prefix = [](const std::string& issue) { return issue.substr(0, issue.find(':')); };
  std::set<std::string> seen;
  for (const auto& i : issues) seen.insert(prefix(i));
  for (auto& i : validation_issues(cfg)) {
    if (!seen.contains(prefix(i))) issues.push_back(std::move(i));
  }
  if (!issues.empty()) throw ConfigError(ErrorCode::ValidationError, issues);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), fs::path(path).parent_path().string());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  json doc;
  doc["scenario"] = cfg.scenario;
  if (!cfg.description.empty()) doc["description"] = cfg.description;
  const int dim = cfg.grid.dim;
  json bounds = json::array();
  for (int a = 0; a < dim; ++a) bounds.push_back(json::array({cfg.grid.bounds[a].min, cfg.grid.bounds[a].max}));
  doc["grid"] = {{"dim", dim}, {"n", cfg.grid.n}, {"bounds", bounds},
                 {"boundary", kBoundaryNames.name(cfg.grid.boundary)}};
  doc["physics"] = {{"hbar", cfg.physics.hbar}, {"mass", cfg.physics.mass}};

  json pot;
  pot["kind"] = kPotentialNames.name(cfg.potential.kind);
  switch (cfg.potential.kind) {
    case PotentialKind::Harmonic: pot["omega"] = cfg.potential.omega; break;
    case PotentialKind::Quartic: pot["lambda"] = cfg.potential.lambda; break;
    case PotentialKind::LinearTilt: pot["force"] = cfg.potential.force; break;
    case PotentialKind::Tabulated: pot["file"] = cfg.potential.file; break;
    case PotentialKind::Free: break;
  }
  doc["potential"] = pot;

  const auto& st = cfg.initial_state;
  json init;
  init["kind"] = kInitialNames.name(st.kind);
  switch (st.kind) {
    case InitialKind::Gaussian:
    {
      const json packet = packet_json(st.first, dim);
      for (const auto& [k, v] : packet.items()) init[k] = v;
      break;
    }
    case InitialKind::TwoGaussian:
      init["first"] = packet_json(st.first, dim);
      init["second"] = packet_json(st.second, dim);
      init["c1"] = json::array({st.c1.real(), st.c1.imag()});
      init["c2"] = json::array({st.c2.real(), st.c2.imag()});
      break;
    case InitialKind::Vortex: {
      init["n"] = st.winding;
      init["r0"] = st.r0;
      json center = json::array();
      for (int a = 0; a < dim; ++a) center.push_back(st.center[a]);
      init["center"] = center;
      break;
    }
    case InitialKind::Tabulated: init["file"] = st.file; break;
  }
  doc["initial_state"] = init;
  doc["evolver"] = {{"kind", kEvolverNames.name(cfg.evolver.kind)},
                    {"cfl_safety", cfg.evolver.cfl_safety},
                    {"caustic_threshold", cfg.evolver.caustic_threshold}};
  doc["time"] = {{"dt", cfg.time.dt}, {"t_end", cfg.time.t_end}, {"snapshot_stride", cfg.time.snapshot_stride}};
  if (cfg.trajectories) {
    doc["trajectories"] = {{"count", cfg.trajectories->count}, {"seed", cfg.trajectories->seed}};
  }
  json probes = json::array();
  for (const auto& p : cfg.probes) {
    json pj;
    pj["name"] = p.name;
    if (p.threshold) pj["threshold"] = *p.threshold;
    if (!p.params.empty()) {
      json params = json::object();
      for (const auto& [k, v] : p.params) params[k] = v;
      pj["params"] = params;
    }
    probes.push_back(pj);
  }
  doc["probes"] = probes;
  json out;
  if (!cfg.output_dir.empty()) out["directory"] = cfg.output_dir;
  out["fields"] = cfg.write_fields;
  doc["output"] = out;
  return doc.dump(2) + "\n";
}

std::vector<std::string> validation_issues(const ExperimentConfig& cfg) {
  std::vector<std::string> issues;
  auto bad = [&](const std::string& path, const std::string& msg) { issues.push_back(path + ": " + msg); };

  if (cfg.scenario.empty()) bad("scenario", "must not be empty");
  const auto& g = cfg.grid;
  bool grid_ok = true;
  if (g.dim != 1 && g.dim != 2) {
    bad("grid.dim", "must be 1 or 2");
    grid_ok = false;
  }
  if (g.n < 8) {
    bad("grid.n", "must be >= 8");
    grid_ok = false;
  }
  for (int a = 0; a < std::clamp(g.dim, 1, 2); ++a) {
    if (!finite_all({g.bounds[a].min, g.bounds[a].max}) || !(g.bounds[a].min < g.bounds[a].max)) {
      bad(index_path("grid.bounds", a), "needs finite min < max");
      grid_ok = false;
    }
  }
  if (cfg.evolver.kind == EvolverKind::Linear && g.boundary != Boundary::Periodic) {
    bad("grid.boundary", "the linear evolver needs a periodic grid");
    grid_ok = false;
  }
  if (g.boundary == Boundary::Periodic && !power_of_two(g.n)) {
    bad("grid.n", "periodic grids use spectral derivatives and need a power of two");
    grid_ok = false;
  }

  if (!(cfg.physics.hbar > 0.0) || !std::isfinite(cfg.physics.hbar)) bad("physics.hbar", "must be > 0");
  if (!(cfg.physics.mass > 0.0) || !std::isfinite(cfg.physics.mass)) bad("physics.mass", "must be > 0");

  const auto& pot = cfg.potential;
  switch (pot.kind) {
    case PotentialKind::Harmonic:
      if (!std::isfinite(pot.omega)) bad("potential.omega", "must be finite");
      break;
    case PotentialKind::Quartic:
      if (!std::isfinite(pot.lambda)) bad("potential.lambda", "must be finite");
      break;
    case PotentialKind::LinearTilt:
      if (!std::isfinite(pot.force)) bad("potential.force", "must be finite");
      break;
    case PotentialKind::Tabulated:
      if (pot.file.empty()) {
        bad("potential.file", "missing");
      } else if (!fs::exists(cfg.resolve(pot.file))) {
        bad("potential.file", "file not found: " + cfg.resolve(pot.file));
        grid_ok = false;
      }
      break;
    case PotentialKind::Free: break;
  }

  const auto& st = cfg.initial_state;
  bool state_ok = true;
  auto check_packet = [&](const GaussianPacket& p, const std::string& path) {
    if (!(p.sigma > 0.0) || !std::isfinite(p.sigma)) {
      bad(join(path, "sigma"), "must be > 0");
      state_ok = false;
    }
    if (!finite_all({p.center[0], p.center[1], p.momentum[0], p.momentum[1], p.chirp})) {
      bad(path, "packet parameters must be finite");
      state_ok = false;
    }
  };
  switch (st.kind) {
    case InitialKind::Gaussian: check_packet(st.first, "initial_state"); break;
    case InitialKind::TwoGaussian:
      check_packet(st.first, "initial_state.first");
      check_packet(st.second, "initial_state.second");
      if (st.c1 == cplx{0.0, 0.0} && st.c2 == cplx{0.0, 0.0}) {
        bad("initial_state.c1", "c1 and c2 cannot both vanish");
        state_ok = false;
      }
      break;
    case InitialKind::Vortex:
      if (g.dim != 2) {
        bad("initial_state.kind", "vortex states need a 2D grid");
        state_ok = false;
      }
      if (!(st.r0 > 0.0) || !std::isfinite(st.r0)) {
        bad("initial_state.r0", "must be > 0");
        state_ok = false;
      }
      break;
    case InitialKind::Tabulated:
      if (!fs::exists(cfg.resolve(st.file))) {
        bad("initial_state.file", "file not found: " + cfg.resolve(st.file));
        state_ok = false;
      }
      break;
  }

  if (!(cfg.evolver.cfl_safety > 0.0 && cfg.evolver.cfl_safety <= 1.0)) {
    bad("evolver.cfl_safety", "must lie in (0, 1]");
  }
  if (!(cfg.evolver.caustic_threshold > 0.0)) bad("evolver.caustic_threshold", "must be > 0");
  if (!(cfg.time.dt > 0.0) || !std::isfinite(cfg.time.dt)) bad("time.dt", "must be > 0");
  if (!(cfg.time.t_end >= 0.0) || !std::isfinite(cfg.time.t_end)) bad("time.t_end", "must be >= 0");
  if (cfg.time.snapshot_stride < 1) bad("time.snapshot_stride", "must be >= 1");
  if (cfg.trajectories && cfg.trajectories->count < 1) bad("trajectories.count", "must be >= 1");

  const auto& names = known_probes();
  for (std::size_t i = 0; i < cfg.probes.size(); ++i) {
    const auto& p = cfg.probes[i];
    const std::string path = index_path("probes", i);
    if (std::find(names.begin(), names.end(), p.name) == names.end()) {
      bad(join(path, "name"), "unknown probe '" + p.name + "'");
      continue;
    }
    if (p.threshold && !std::isfinite(*p.threshold)) bad(join(path, "threshold"), "must be finite");
    if ((p.name == "superposition_violation" || p.name == "interference") && st.kind != InitialKind::TwoGaussian) {
      bad(path, p.name + " needs a two_gaussian initial state");
    }
    if (p.name == "ehrenfest" && cfg.time.dt > 0.0 && !(cfg.time.t_end >= 2.0 * cfg.time.dt * (1.0 - 1e-9))) {
      bad(path, "ehrenfest needs at least 3 time steps (t_end >= 2 dt)");
    }
    if (p.name == "winding" && st.kind != InitialKind::Vortex) bad(path, "winding needs a vortex initial state");
    if ((p.name == "pure_vs_mixed" || p.name == "exchange_term") && g.dim != 1) {
      bad(path, p.name + " needs a 1D grid");
    }
    if (p.name == "r_linearity") {
      if (cfg.evolver.kind != EvolverKind::Classical) bad(path, "r_linearity needs the classical evolver");
      if (p.param("contrast", 1.0) != 0.0 && !power_of_two(g.n)) {
        bad(path, "the r_linearity contrast run is spectral and needs grid.n a power of two "
                  "(set params.contrast to 0 to skip it)");
      }
    }
    if (p.name == "indirect_momentum" && grid_ok) {
      const double dx = g.build().min_dx();
      if (!(p.param("sigma_m", 2.0 * dx) >= 2.0 * dx * (1.0 - 1e-12))) {
        bad(join(path, "params.sigma_m"), "must be at least 2 dx");
      }
      if (!(p.param("gap", 1.0) > 0.0)) bad(join(path, "params.gap"), "must be > 0");
      if (!(p.param("cycles", 100.0) >= 1.0)) bad(join(path, "params.cycles"), "must be >= 1");
    }
    if (p.name == "superposition_violation" && st.kind == InitialKind::TwoGaussian && grid_ok && state_ok &&
        issues.empty()) {
      try {
        const auto [psi1, psi2] = build_components(cfg, g.build());
        check_node_free(psi1, psi2, st.c1, st.c2);
      } catch (const Error& e) {
        bad(path, std::string("node-free precondition |c1| R1 > |c2| R2 fails (") + e.what() + ")");
      }
    }
  }
  return issues;
}

void validate(const ExperimentConfig& cfg) {
  auto issues = validation_issues(cfg);
  if (!issues.empty()) throw ConfigError(ErrorCode::ValidationError, std::move(issues));
}

Potential build_potential(const ExperimentConfig& cfg, const Grid& grid) {
  const auto& p = cfg.potential;
  switch (p.kind) {
    case PotentialKind::Free: return Potential::free();
    case PotentialKind::Harmonic: return Potential::harmonic(p.omega);
    case PotentialKind::Quartic: return Potential::quartic(p.lambda);
    case PotentialKind::LinearTilt: return Potential::linear_tilt(p.force);
    case PotentialKind::Tabulated: return Potential::tabulated(read_scalar_table(grid, cfg.resolve(p.file)));
  }
  return Potential::free();
}

std::pair<WaveFunction, WaveFunction> build_components(const ExperimentConfig& cfg, const Grid& grid) {
  const auto& st = cfg.initial_state;
  return {gaussian_wave(grid, st.first, cfg.physics), gaussian_wave(grid, st.second, cfg.physics)};
}

State build_initial_state(const ExperimentConfig& cfg, const Grid& grid) {
  const auto& st = cfg.initial_state;
  switch (st.kind) {
    case InitialKind::Gaussian:
      if (cfg.evolver.kind == EvolverKind::Classical) return gaussian_fields(grid, st.first);
      return gaussian_wave(grid, st.first, cfg.physics);
    case InitialKind::TwoGaussian: {
      const auto [a, b] = build_components(cfg, grid);
      WaveFunction sum(grid);
      for (std::size_t i = 0; i < sum.values.size(); ++i) sum.values[i] = st.c1 * a.values[i] + st.c2 * b.values[i];
      return sum;
    }
    case InitialKind::Vortex: return vortex_wave(grid, st.winding, st.r0, st.center);
    case InitialKind::Tabulated: return read_wave_table(grid, cfg.resolve(st.file));
  }
  throw Error(ErrorCode::InvalidArgument, "unknown initial state");
}

}  // namespace wavemech
