#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>

#include "gqg/errors.hpp"
#include "gqg/harness.hpp"

namespace gqg {

using nlohmann::json;

namespace {

constexpr double pi = std::numbers::pi;

void reject_unknown(const json& j, const char* where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(std::string(where) + ": expected a JSON object");
  const std::set<std::string> known(keys.begin(), keys.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) throw ConfigError(std::string(where) + ": unknown key '" + it.key() + "'");
}

template <class T>
void read(const json& j, const char* key, T& out, const char* where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string(where) + "." + key + ": " + e.what());
  }
}

const char* kind_name(InitialDataSpec::Kind k) {
  switch (k) {
    case InitialDataSpec::Kind::random_seeded: return "random_seeded";
    case InitialDataSpec::Kind::balanced: return "balanced";
    case InitialDataSpec::Kind::single_mode: return "single_mode";
    case InitialDataSpec::Kind::from_snapshot: return "from_snapshot";
  }
  return "?";
}

InitialDataSpec::Kind kind_from(const std::string& s) {
  if (s == "random_seeded") return InitialDataSpec::Kind::random_seeded;
  if (s == "balanced") return InitialDataSpec::Kind::balanced;
  if (s == "single_mode") return InitialDataSpec::Kind::single_mode;
  if (s == "from_snapshot") return InitialDataSpec::Kind::from_snapshot;
  throw ConfigError("initial_data.kind: unknown kind '" + s + "'");
}

bool trig_ok(const std::string& s) { return s == "sin" || s == "cos"; }

template <class F>
ScalarField sample(const ChannelGrid& g, F&& f) {
  ScalarField r = ScalarField::zeros(g);
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j)
      for (int k = 0; k < g.nzp(); ++k) r(i, j, k) = f(g.x(i), g.y(j), g.z(k));
  return r;
}

// Band-limited random fields from a seeded 64-bit Mersenne twister; the
// double conversion is spelled out so that results do not depend on the
// standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : e_(seed) {}
  double uniform(double a, double b) { return a + (b - a) * static_cast<double>(e_() >> 11) * 0x1.0p-53; }
  int integer(int lo, int hi) { return lo + static_cast<int>(e_() % static_cast<std::uint64_t>(hi - lo + 1)); }

  ScalarField smooth(const ChannelGrid& g, int kmax, int terms, bool dirichlet) {
    ScalarField f = ScalarField::zeros(g);
    const double h = g.h();
    for (int t = 0; t < terms; ++t) {
      const int k1 = integer(-kmax, kmax), k2 = integer(-kmax, kmax), m = integer(dirichlet ? 1 : 0, kmax);
      const double amp = uniform(-1, 1), phase = uniform(0, 2 * pi);
      f += sample(g, [&](double x, double y, double z) {
        const double vert = dirichlet ? std::sin(m * pi * z / h) : std::cos(m * pi * z / h + 0.3 * m);
        return amp * std::cos(2 * pi * (k1 * x + k2 * y) + phase) * vert;
      });
    }
    return f;
  }

 private:
  std::mt19937_64 e_;
};

constexpr int kRandomTerms = 4;

double trig(const std::string& kind, double arg) { return kind == "sin" ? std::sin(arg) : std::cos(arg); }
double dtrig(const std::string& kind, double arg) { return kind == "sin" ? std::cos(arg) : -std::sin(arg); }

}  // namespace

const char* to_string(Formulation f) {
  switch (f) {
    case Formulation::gpv: return "gpv";
    case Formulation::primitive: return "primitive";
    case Formulation::limit: return "limit";
  }
  return "?";
}

Formulation formulation_from_string(const std::string& s) {
  if (s == "gpv") return Formulation::gpv;
  if (s == "primitive") return Formulation::primitive;
  if (s == "limit") return Formulation::limit;
  throw ConfigError("formulation must be gpv, primitive or limit, got '" + s + "'");
}

void RunConfig::validate() const {
  if (grid.nx <= 0 || grid.ny <= 0 || grid.nz <= 0) throw ConfigError("grid: nx, ny, nz must be positive");
  if (grid.nx % 2 || grid.ny % 2) throw ConfigError("grid: nx and ny must be even");
  if (grid.nz < 2) throw ConfigError("grid: nz must be at least 2");
  if (!(grid.h > 0.0) || !std::isfinite(grid.h)) throw ConfigError("grid: h must be positive");
  if (eps.empty()) throw ConfigError("eps: at least one value is required");
  for (double e : eps)
    if (!(e > 0.0) || !std::isfinite(e)) throw ConfigError("eps: every value must be positive and finite");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end must be nonnegative and finite");
  integrator.validate();
  if (integrator.dt < 0.0) throw ConfigError("integrator.dt must be positive or \"auto\"");
  if (outputs.diagnostics_every < 1) throw ConfigError("outputs.diagnostics_every must be at least 1");
  if (outputs.snapshot_every < 0) throw ConfigError("outputs.snapshot_every must be nonnegative");
  if (sweep_samples < 1) throw ConfigError("sweep.samples must be at least 1");
  if (jobs < 1) throw ConfigError("jobs must be at least 1");

  const InitialDataSpec& in = initial;
  if (!std::isfinite(in.amplitude)) throw ConfigError("initial_data.amplitude must be finite");
  const ChannelGrid g = grid.make();
  switch (in.kind) {
    case InitialDataSpec::Kind::random_seeded:
      if (in.bandwidth < 1) throw ConfigError("initial_data.bandwidth must be at least 1");
      if (3 * in.bandwidth > std::min(grid.nx, grid.ny))
        throw ConfigError("initial_data.bandwidth " + std::to_string(in.bandwidth) + " exceeds the dealias limit N/3");
      if (2 * grid.nz < 3 * in.bandwidth)
        throw ConfigError("grid.nz must be at least 1.5x the vertical bandwidth of the initial data");
      break;
    case InitialDataSpec::Kind::balanced:
      if (in.modes.empty()) throw ConfigError("initial_data.modes: at least one mode is required");
      for (const StreamMode& m : in.modes) {
        if (!trig_ok(m.x) || !trig_ok(m.y) || !trig_ok(m.z))
          throw ConfigError("initial_data.modes: factors must be \"sin\" or \"cos\"");
        if (m.m < 0) throw ConfigError("initial_data.modes: m must be nonnegative");
        if (!g.retained(m.kx, m.ky)) throw ConfigError("initial_data.modes: wavenumber exceeds the dealias limit");
        if (2 * grid.nz < 3 * m.m) throw ConfigError("grid.nz must be at least 1.5x the vertical mode number");
      }
      break;
    case InitialDataSpec::Kind::single_mode:
      if (in.k1 == 0 && in.k2 == 0) throw ConfigError("initial_data: single_mode needs a nonzero horizontal wavenumber");
      if (in.m < 0) throw ConfigError("initial_data.m must be nonnegative");
      if (!g.retained(2 * in.k1, 2 * in.k2))
        throw ConfigError("initial_data: single_mode wavenumber exceeds the dealias limit for its products");
      if (2 * grid.nz < 3 * in.m) throw ConfigError("grid.nz must be at least 1.5x the vertical mode number");
      break;
    case InitialDataSpec::Kind::from_snapshot:
      if (in.path.empty()) throw ConfigError("initial_data.path is required for from_snapshot");
      break;
  }
}

json RunConfig::to_json() const {
  json modes = json::array();
  for (const StreamMode& m : initial.modes)
    modes.push_back({{"amplitude", m.amplitude}, {"kx", m.kx}, {"ky", m.ky}, {"m", m.m}, {"x", m.x}, {"y", m.y},
                     {"z", m.z}});
  json j;
  j["grid"] = {{"nx", grid.nx}, {"ny", grid.ny}, {"nz", grid.nz}, {"h", grid.h}, {"dealias", grid.dealias}};
  j["eps"] = eps.size() == 1 ? json(eps[0]) : json(eps);
  j["t_end"] = t_end;
  j["formulation"] = to_string(formulation);
  j["integrator"] = {{"dt", integrator.dt > 0.0 ? json(integrator.dt) : json("auto")},
                     {"cfl", integrator.cfl},
                     {"eps_resolution", integrator.eps_resolution},
                     {"dt_max", integrator.dt_max},
                     {"constraint_projection", integrator.constraint_projection},
                     {"check_cfl", integrator.check_cfl},
                     {"div_tol", integrator.div_tol},
                     {"nonlinear", integrator.tendency.nonlinear}};
  j["initial_data"] = {{"kind", kind_name(initial.kind)},
                       {"seed", initial.seed},
                       {"bandwidth", initial.bandwidth},
                       {"amplitude", initial.amplitude},
                       {"modes", modes},
                       {"k", {initial.k1, initial.k2}},
                       {"m", initial.m},
                       {"path", initial.path}};
  j["outputs"] = {{"diagnostics_every", outputs.diagnostics_every},
                  {"snapshot_every", outputs.snapshot_every},
                  {"out_dir", outputs.out_dir}};
  j["sweep"] = {{"samples", sweep_samples}};
  j["jobs"] = jobs;
  return j;
}

RunConfig RunConfig::from_json(const json& j) {
  RunConfig c;
  reject_unknown(j, "config",
                 {"grid", "eps", "t_end", "formulation", "integrator", "initial_data", "outputs", "sweep", "jobs"});
  if (j.contains("grid")) {
    const json& g = j["grid"];
    reject_unknown(g, "grid", {"nx", "ny", "nz", "h", "dealias"});
    read(g, "nx", c.grid.nx, "grid");
    read(g, "ny", c.grid.ny, "grid");
    read(g, "nz", c.grid.nz, "grid");
    read(g, "h", c.grid.h, "grid");
    read(g, "dealias", c.grid.dealias, "grid");
  }
  if (j.contains("eps")) {
    const json& e = j["eps"];
    if (e.is_number()) c.eps = {e.get<double>()};
    else if (e.is_array()) read(j, "eps", c.eps, "config");
    else throw ConfigError("eps must be a number or a list of numbers");
  }
  read(j, "t_end", c.t_end, "config");
  if (j.contains("formulation")) {
    std::string f;
    read(j, "formulation", f, "config");
    c.formulation = formulation_from_string(f);
  }
  if (j.contains("integrator")) {
    const json& in = j["integrator"];
    reject_unknown(in, "integrator",
                   {"dt", "cfl", "eps_resolution", "dt_max", "constraint_projection", "check_cfl", "div_tol",
                    "nonlinear"});
    if (in.contains("dt")) {
      if (in["dt"].is_string()) {
        if (in["dt"].get<std::string>() != "auto") throw ConfigError("integrator.dt must be a number or \"auto\"");
        c.integrator.dt = 0.0;
      } else {
        read(in, "dt", c.integrator.dt, "integrator");
        if (!(c.integrator.dt > 0.0)) throw ConfigError("integrator.dt must be positive when given explicitly");
      }
    }
    read(in, "cfl", c.integrator.cfl, "integrator");
    read(in, "eps_resolution", c.integrator.eps_resolution, "integrator");
    read(in, "dt_max", c.integrator.dt_max, "integrator");
    read(in, "constraint_projection", c.integrator.constraint_projection, "integrator");
    read(in, "check_cfl", c.integrator.check_cfl, "integrator");
    read(in, "div_tol", c.integrator.div_tol, "integrator");
    read(in, "nonlinear", c.integrator.tendency.nonlinear, "integrator");
  }
  if (j.contains("initial_data")) {
    const json& in = j["initial_data"];
    reject_unknown(in, "initial_data", {"kind", "seed", "bandwidth", "amplitude", "modes", "k", "m", "path"});
    if (in.contains("kind")) {
      std::string k;
      read(in, "kind", k, "initial_data");
      c.initial.kind = kind_from(k);
    }
    read(in, "seed", c.initial.seed, "initial_data");
    read(in, "bandwidth", c.initial.bandwidth, "initial_data");
    read(in, "amplitude", c.initial.amplitude, "initial_data");
    read(in, "m", c.initial.m, "initial_data");
    read(in, "path", c.initial.path, "initial_data");
    if (in.contains("k")) {
      std::vector<int> k;
      read(in, "k", k, "initial_data");
      if (k.size() != 2) throw ConfigError("initial_data.k must have two entries");
      c.initial.k1 = k[0];
      c.initial.k2 = k[1];
    }
    if (in.contains("modes")) {
      if (!in["modes"].is_array()) throw ConfigError("initial_data.modes must be a list");
      c.initial.modes.clear();
      for (const json& m : in["modes"]) {
        reject_unknown(m, "initial_data.modes[]", {"amplitude", "kx", "ky", "m", "x", "y", "z"});
        StreamMode s;
        read(m, "amplitude", s.amplitude, "mode");
        read(m, "kx", s.kx, "mode");
        read(m, "ky", s.ky, "mode");
        read(m, "m", s.m, "mode");
        read(m, "x", s.x, "mode");
        read(m, "y", s.y, "mode");
        read(m, "z", s.z, "mode");
        c.initial.modes.push_back(s);
      }
    }
  }
  if (j.contains("outputs")) {
    const json& o = j["outputs"];
    reject_unknown(o, "outputs", {"diagnostics_every", "snapshot_every", "out_dir"});
    read(o, "diagnostics_every", c.outputs.diagnostics_every, "outputs");
    read(o, "snapshot_every", c.outputs.snapshot_every, "outputs");
    read(o, "out_dir", c.outputs.out_dir, "outputs");
  }
  if (j.contains("sweep")) {
    reject_unknown(j["sweep"], "sweep", {"samples"});
    read(j["sweep"], "samples", c.sweep_samples, "sweep");
  }
  read(j, "jobs", c.jobs, "config");
  c.integrator.t_end = c.t_end;
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return from_json(j);
}

PrimitiveState generate_initial(const ChannelOps& ops, const InitialDataSpec& spec, double eps) {
  const ChannelGrid& g = ops.grid();
  const double h = g.h();
  PrimitiveState p = PrimitiveState::zeros(g, eps);
  switch (spec.kind) {
    case InitialDataSpec::Kind::random_seeded: {
      if (3 * spec.bandwidth > std::min(g.nx(), g.ny()))
        throw ConfigError("initial_data.bandwidth exceeds the dealias limit N/3");
      Rng rng(spec.seed);
      const int kb = spec.bandwidth;
      // u = curl A with A_h = 0 on the walls, so w vanishes there and div u = 0.
      const ScalarField a1 = rng.smooth(g, kb, kRandomTerms, true);
      const ScalarField a2 = rng.smooth(g, kb, kRandomTerms, true);
      const ScalarField a3 = rng.smooth(g, kb, kRandomTerms, false);
      p.v.x1 = ops.ddy(a3) - ops.ddz(a2);
      p.v.x2 = ops.ddz(a1) - ops.ddx(a3);
      p.w = ops.ddx(a2) - ops.ddy(a1);
      p.theta = rng.smooth(g, kb, kRandomTerms, false);
      const double m = std::max({p.v.max_abs(), p.w.max_abs(), p.theta.max_abs()});
      const double s = m > 0.0 ? spec.amplitude / m : 0.0;
      p.v *= s;
      p.w *= s;
      p.theta *= s;
      for (int i = 0; i < g.nx(); ++i)
        for (int j = 0; j < g.ny(); ++j) {
          p.w(i, j, 0) = 0.0;
          p.w(i, j, g.nz()) = 0.0;
        }
      break;
    }
    case InitialDataSpec::Kind::balanced: {
      // v = grad_h^perp p0, theta = dz p0, w = 0.
      for (const StreamMode& md : spec.modes) {
        if (!g.retained(md.kx, md.ky)) throw ConfigError("initial_data.modes: wavenumber exceeds the dealias limit");
        const double a = md.amplitude * spec.amplitude;
        const double kx = 2 * pi * md.kx, ky = 2 * pi * md.ky, kz = md.m * pi / h;
        p.v.x1 += sample(g, [&](double x, double y, double z) {
          return -a * trig(md.x, kx * x) * ky * dtrig(md.y, ky * y) * trig(md.z, kz * z);
        });
        p.v.x2 += sample(g, [&](double x, double y, double z) {
          return a * kx * dtrig(md.x, kx * x) * trig(md.y, ky * y) * trig(md.z, kz * z);
        });
        p.theta += sample(g, [&](double x, double y, double z) {
          return a * trig(md.x, kx * x) * trig(md.y, ky * y) * kz * dtrig(md.z, kz * z);
        });
      }
      break;
    }
    case InitialDataSpec::Kind::single_mode: {
      // w = a cos(k.x) sin(M z); a potential flow balances its divergence and a
      // rotational part plus theta = a sin(k.x) cos(M z) make the mode interact.
      const double a = spec.amplitude;
      const double k1 = 2 * pi * spec.k1, k2 = 2 * pi * spec.k2;
      const double K2 = k1 * k1 + k2 * k2, K = std::sqrt(K2), M = spec.m * pi / h;
      const double beta = a * M / K2;
      const auto ph = [&](double x, double y) { return k1 * x + k2 * y; };
      p.w = sample(g, [&](double x, double y, double z) { return a * std::cos(ph(x, y)) * std::sin(M * z); });
      p.v.x1 = sample(g, [&](double x, double y, double z) {
        const double s = std::sin(ph(x, y)), c = std::cos(M * z);
        return -beta * k1 * s * c + (a / K) * k2 * s * c;
      });
      p.v.x2 = sample(g, [&](double x, double y, double z) {
        const double s = std::sin(ph(x, y)), c = std::cos(M * z);
        return -beta * k2 * s * c - (a / K) * k1 * s * c;
      });
      p.theta = sample(g, [&](double x, double y, double z) { return a * std::sin(ph(x, y)) * std::cos(M * z); });
      break;
    }
    case InitialDataSpec::Kind::from_snapshot: {
      const Snapshot s = read_snapshot(spec.path);
      if (s.kind == "primitive") p = primitive_from_snapshot(g, s);
      else if (s.kind == "gpv") p = reconstruct_primitive(ops, gpv_from_snapshot(g, s));
      else throw ConfigError("initial_data: snapshot kind '" + s.kind + "' cannot seed a run");
      p.eps = eps;
      p.t = 0.0;
      break;
    }
  }
  return p;
}

LimitState initial_limit_state(const ChannelOps& ops, const PrimitiveState& p) {
  return project_to_limit(extract_gpv(ops, p));
}

}  // namespace gqg
