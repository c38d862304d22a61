#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "gqg/errors.hpp"
#include "gqg/harness.hpp"

namespace gqg {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kBlowupFactor = 10.0;

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

// Number of equal steps of size <= dt that cover an interval exactly.
int steps_for(double interval, double dt) {
  if (interval <= 0.0) return 0;
  return std::max(1, static_cast<int>(std::ceil(interval / dt - 1e-9)));
}

double bound_dt(const ChannelOps& ops, const PrimitiveState& p, const IntegratorConfig& cfg, double eps, bool limit) {
  if (cfg.dt > 0.0) return cfg.dt;
  PrimitiveState q = p;
  q.eps = limit ? std::numeric_limits<double>::infinity() : eps;
  const double adv = advective_dt(ops, q.v, limit ? nullptr : &q.w, cfg.cfl);
  double b = std::min(adv, cfg.dt_max);
  if (!limit) b = std::min(b, cfg.eps_resolution * eps);
  return 0.8 * b;
}

// Per-formulation plumbing for the generic run loop.
struct StepInfo {
  double mean_correction = 0.0, compat_correction = 0.0, div_cleaned = 0.0;
};

GPVState advance(const ChannelOps& ops, const GPVState& g, double dt, const IntegratorConfig& cfg, StepInfo& info) {
  ProjectionLog log;
  GPVState out = step_eps_gpv(ops, g, dt, cfg, &log);
  info.mean_correction = log.mean_correction;
  info.compat_correction = log.compat_correction;
  return out;
}
PrimitiveState advance(const ChannelOps& ops, const PrimitiveState& p, double dt, const IntegratorConfig& cfg,
                       StepInfo& info) {
  return step_eps_primitive(ops, p, dt, cfg, &info.div_cleaned);
}
LimitState advance(const ChannelOps& ops, const LimitState& L, double dt, const IntegratorConfig& cfg, StepInfo& info) {
  return step_limit(ops, L, dt, cfg, &info.compat_correction);
}

double h0_sup(const ChannelOps& ops, const GPVState& g) { return trig_sup_norm(ops, g.H0); }
double h0_sup(const ChannelOps& ops, const PrimitiveState& p) { return trig_sup_norm(ops, ops.bottom(p.theta)); }
double h0_sup(const ChannelOps& ops, const LimitState& L) { return trig_sup_norm(ops, L.Hp0); }

PrimitiveState slow_primitive(const ChannelOps& ops, const LimitState& L) {
  const SlowComponents s = limit_reconstruct_slow(ops, L);
  PrimitiveState p = PrimitiveState::zeros(ops.grid());
  p.v = s.v_p;
  p.theta = s.theta_p;
  p.t = L.t;
  return p;
}

DiagnosticsRecord primitive_part(const ChannelOps& ops, const PrimitiveState& p, double t) {
  DiagnosticsRecord d;
  d.t = t;
  d.E_frak = energy_functional(ops, p);
  d.l2_energy = l2_energy(ops, p);
  d.h3_norm = sobolev_norm(ops, {p.v, p.w, p.theta}, 3);
  const PrimitiveReport r = validate_primitive(ops, p);
  d.div_residual = r.div_residual;
  d.bc_residual = r.bc_residual;
  return d;
}

template <class State>
void store_final(RunResult& r, const ChannelOps& ops, const State& s) {
  if constexpr (std::is_same_v<State, GPVState>) {
    r.gpv = s;
    r.primitive = reconstruct_unchecked(ops, s);
    r.primitive->t = s.t;
    r.primitive->eps = s.eps;
  } else if constexpr (std::is_same_v<State, PrimitiveState>) {
    r.primitive = s;
  } else {
    r.limit = s;
  }
}

struct RunFiles {
  fs::path dir;
  std::string diag, proj;
  bool enabled = false;
};

template <class State>
RunResult run_loop(const ChannelOps& ops, State state, const RunConfig& cfg, double dt, int n, RunFiles& files) {
  RunResult r;
  r.dt = dt;
  r.steps = n;
  const ChannelGrid& g = ops.grid();
  const int every_d = cfg.outputs.diagnostics_every, every_s = cfg.outputs.snapshot_every;
  char name[64];
  const auto snapshot = [&](int step, const State& s) {
    if (!files.enabled) return;
    std::snprintf(name, sizeof name, "snapshot_%06d.gqg", step);
    write_snapshot(files.dir / name, to_snapshot(g, s));
  };
  const auto record = [&](const State& s) {
    const DiagnosticsRecord d = diagnostics(ops, s);
    if (!d.all_finite()) throw NumericalInstability("non-finite diagnostics at t = " + g17(s.t));
    r.diagnostics.push_back(d);
    r.sup_E = std::max(r.sup_E, d.E_frak);
    r.max_div_residual = std::max(r.max_div_residual, d.div_residual);
    r.max_bc_residual = std::max(r.max_bc_residual, d.bc_residual);
    r.h0_sup_max = std::max(r.h0_sup_max, h0_sup(ops, s));
    files.diag += d.csv_row() + "\n";
    return d;
  };

  const DiagnosticsRecord d0 = record(state);
  r.E0 = d0.E_frak;
  r.h0_sup_initial = r.h0_sup_max;
  snapshot(0, state);

  const double t0 = state.t;
  for (int step = 1; step <= n; ++step) {
    StepInfo info;
    state = advance(ops, state, dt, cfg.integrator, info);
    state.t = t0 + step * dt;  // no accumulated round-off in the clock
    r.max_projection =
        std::max({r.max_projection, info.mean_correction, info.compat_correction, info.div_cleaned});
    files.proj += std::to_string(step) + "," + g17(state.t) + "," + g17(info.mean_correction) + "," +
                  g17(info.compat_correction) + "," + g17(info.div_cleaned) + "\n";
    if (step % every_d == 0 || step == n) {
      const DiagnosticsRecord d = record(state);
      if (d.E_frak > kBlowupFactor * std::max(r.E0, std::numeric_limits<double>::min()) && r.E0 > 0.0) {
        store_final(r, ops, state);
        r.steps = step;
        throw NumericalInstability("blow-up: E_frak = " + g17(d.E_frak) + " exceeds 10x its initial value " +
                                   g17(r.E0) + " at t = " + g17(state.t));
      }
    }
    if ((every_s > 0 && step % every_s == 0) || step == n) snapshot(step, state);
  }
  store_final(r, ops, state);
  return r;
}

json summary_json(const RunConfig& cfg, const RunResult& r, const std::string& status, const std::string& reason) {
  json j;
  j["status"] = status;
  if (!reason.empty()) j["reason"] = reason;
  j["formulation"] = to_string(cfg.formulation);
  j["eps"] = cfg.eps.front();
  j["dt"] = r.dt;
  j["steps"] = r.steps;
  j["E_frak_initial"] = r.E0;
  j["sup_E_frak"] = r.sup_E;
  j["h0_sup_initial"] = r.h0_sup_initial;
  j["h0_sup_max"] = r.h0_sup_max;
  j["max_projection"] = r.max_projection;
  j["max_div_residual"] = r.max_div_residual;
  j["max_bc_residual"] = r.max_bc_residual;
  j["config"] = cfg.to_json();
  return j;
}

// Everything the sweep and the well-prepared driver share.
struct SweepRun {
  SweepReport report;
  std::vector<LimitState> limit_samples;  // at t = s T / samples, s = 0..samples
};

SweepRun sweep_impl(const RunConfig& config) {
  config.validate();
  if (config.eps.size() < 3) throw ConfigError("sweep: at least three eps values are required");
  std::vector<double> eps = config.eps;
  std::sort(eps.begin(), eps.end(), std::greater<>());
  if (std::adjacent_find(eps.begin(), eps.end()) != eps.end()) throw ConfigError("sweep: eps values must be distinct");

  const ChannelGrid grid = config.grid.make();
  const ChannelOps ops(grid);
  const double T = config.t_end;
  const int S = config.sweep_samples;
  const double interval = T / S;

  const PrimitiveState p0 = generate_initial(ops, config.initial, eps.front());
  const LimitState L0 = initial_limit_state(ops, p0);

  // Per-eps dt, each dividing the sampling interval.
  std::vector<double> dts(eps.size());
  std::vector<int> per(eps.size());
  for (std::size_t e = 0; e < eps.size(); ++e) {
    const double b = bound_dt(ops, p0, config.integrator, eps[e], false);
    per[e] = T > 0.0 ? steps_for(interval, b) : 0;
    dts[e] = T > 0.0 ? interval / per[e] : 0.0;
  }
  // The limit run uses the finest eps member's dt.
  const int per_limit = per.back();
  const double dt_limit = dts.back();

  SweepRun out;
  out.limit_samples.push_back(L0);
  {
    LimitState L = L0;
    for (int s = 1; s <= S && T > 0.0; ++s) {
      for (int k = 1; k <= per_limit; ++k) {
        double removed = 0.0;
        L = step_limit(ops, L, dt_limit, config.integrator, &removed);
        L.t = (s - 1) * interval + k * dt_limit;
      }
      L.t = s * interval;
      out.limit_samples.push_back(L);
    }
  }
  const auto& Ls = out.limit_samples;

  std::vector<SweepRow> rows(eps.size());
  std::vector<std::exception_ptr> errors(eps.size());
  std::atomic<std::size_t> next{0};
  const auto member = [&](std::size_t e) {
    SweepRow row;
    row.eps = eps[e];
    row.dt = dts[e];
    PrimitiveState pe = p0;
    pe.eps = eps[e];
    GPVState g = extract_gpv(ops, pe);
    g.eps = eps[e];
    const double E0 = energy_functional(ops, pe);
    row.sup_E_frak = E0;
    const auto compare = [&](const GPVState& gs, const LimitState& L, bool final) {
      const FastPair f = fast_filter(gs);
      const double ephi = sobolev_norm(ops, gs.Phi - L.Phi_p, 1);
      const double epsi = sobolev_norm(ops, f.Psi_plus - L.psi_p, 1);
      const double ez = sobolev_norm(ops, f.Z_plus - L.z_p, 2);
      row.sup_err_phi_H1 = std::max(row.sup_err_phi_H1, ephi);
      row.sup_err_psi_H1 = std::max(row.sup_err_psi_H1, epsi);
      row.sup_err_z_H2 = std::max(row.sup_err_z_H2, ez);
      if (final) {
        row.err_phi_H1 = ephi;
        row.err_psi_H1 = epsi;
        row.err_z_H2 = ez;
        const PrimitiveState pn = reconstruct_unchecked(ops, gs);
        const PrimitiveState pa = compose_approximation(ops, L, gs.t, eps[e]);
        row.err_theta_H2 = sobolev_norm(ops, pn.theta - pa.theta, 2);
        row.err_v_H2 = sobolev_norm(ops, pn.v - pa.v, 2);
      }
    };
    compare(g, Ls[0], S == 0 || T == 0.0);
    int step = 0;
    for (int s = 1; s <= S && T > 0.0; ++s) {
      for (int k = 1; k <= per[e]; ++k) {
        g = step_eps_gpv(ops, g, dts[e], config.integrator);
        g.t = (s - 1) * interval + k * dts[e];
        if (++step % config.outputs.diagnostics_every == 0 || k == per[e]) {
          const double E = energy_functional(ops, reconstruct_unchecked(ops, g));
          if (!std::isfinite(E) || (E0 > 0.0 && E > kBlowupFactor * E0))
            throw NumericalInstability("sweep member eps = " + g17(eps[e]) + ": blow-up, E_frak = " + g17(E) +
                                       " at t = " + g17(g.t));
          row.sup_E_frak = std::max(row.sup_E_frak, E);
        }
      }
      g.t = s * interval;
      compare(g, Ls[s], s == S);
    }
    rows[e] = row;
  };
  const auto worker = [&] {
    for (std::size_t e; (e = next.fetch_add(1)) < eps.size();) {
      try {
        member(e);
      } catch (...) {
        errors[e] = std::current_exception();
      }
    }
  };
  const int nthreads = std::min<int>(config.jobs, static_cast<int>(eps.size()));
  std::vector<std::thread> pool;
  for (int i = 1; i < nthreads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);

  SweepReport& rep = out.report;
  rep.rows = rows;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const SweepRow& r : rows) {
    lo = std::min(lo, r.sup_E_frak);
    hi = std::max(hi, r.sup_E_frak);
  }
  rep.uniform_bound_ratio = lo > 0.0 ? hi / lo : (hi == 0.0 ? 1.0 : std::numeric_limits<double>::infinity());
  json policy = config.integrator.dt > 0.0
                    ? json{{"kind", "fixed"}, {"dt", config.integrator.dt}}
                    : json{{"kind", "auto"},
                           {"rule", "0.8 min(cfl advective bound, eps_resolution eps, dt_max) at t = 0"},
                           {"cfl", config.integrator.cfl},
                           {"eps_resolution", config.integrator.eps_resolution},
                           {"dt_max", config.integrator.dt_max}};
  policy["limit_dt"] = dt_limit;
  rep.metadata = {{"grid",
                   {{"nx", config.grid.nx},
                    {"ny", config.grid.ny},
                    {"nz", config.grid.nz},
                    {"h", config.grid.h},
                    {"dealias", config.grid.dealias}}},
                  {"t_end", T},
                  {"samples", S},
                  {"dt_policy", policy},
                  {"seed", config.initial.seed},
                  {"initial_data", config.to_json()["initial_data"]},
                  {"nonlinear", config.integrator.tendency.nonlinear}};
  return out;
}

}  // namespace

double choose_dt(const ChannelOps& ops, const PrimitiveState& p, const RunConfig& cfg, double eps) {
  const double b = bound_dt(ops, p, cfg.integrator, eps, cfg.formulation == Formulation::limit);
  if (cfg.t_end <= 0.0) return b;
  return cfg.t_end / steps_for(cfg.t_end, b);
}

DiagnosticsRecord diagnostics(const ChannelOps& ops, const PrimitiveState& p) {
  DiagnosticsRecord d = primitive_part(ops, p, p.t);
  const GPVReport r = validate_gpv(ops, extract_gpv(ops, p));
  d.mean_residual = r.mean_residual;
  d.compat_residual = r.compat_residual;
  return d;
}

DiagnosticsRecord diagnostics(const ChannelOps& ops, const GPVState& g) {
  DiagnosticsRecord d = primitive_part(ops, reconstruct_unchecked(ops, g), g.t);
  const GPVReport r = validate_gpv(ops, g);
  d.mean_residual = r.mean_residual;
  d.compat_residual = r.compat_residual;
  return d;
}

DiagnosticsRecord diagnostics(const ChannelOps& ops, const LimitState& L) {
  DiagnosticsRecord d = primitive_part(ops, slow_primitive(ops, L), L.t);
  d.compat_residual = validate_limit(ops, L).compat_residual;
  return d;
}

RunResult run_simulation(const RunConfig& config, bool write_files) {
  config.validate();
  const ChannelGrid grid = config.grid.make();
  const ChannelOps ops(grid);
  const double eps = config.eps.front();
  const PrimitiveState p0 = generate_initial(ops, config.initial, eps);
  const double dt = choose_dt(ops, p0, config, eps);
  const int n = steps_for(config.t_end, dt);

  RunFiles files;
  files.enabled = write_files;
  files.dir = config.outputs.out_dir;
  files.diag = std::string(DiagnosticsRecord::csv_header()) + "\n";
  files.proj = "step,t,mean_correction,compat_correction,div_cleaned\n";

  const auto flush = [&](const RunResult& r, const std::string& status, const std::string& reason) {
    if (!write_files) return;
    write_text(files.dir / "diagnostics.csv", files.diag);
    write_text(files.dir / "projection.csv", files.proj);
    write_text(files.dir / "summary.json", summary_json(config, r, status, reason).dump(2) + "\n");
  };

  RunResult r;
  try {
    switch (config.formulation) {
      case Formulation::gpv: {
        GPVState g = extract_gpv(ops, p0);
        g.eps = eps;
        r = run_loop(ops, g, config, dt, n, files);
        break;
      }
      case Formulation::primitive: r = run_loop(ops, p0, config, dt, n, files); break;
      case Formulation::limit: r = run_loop(ops, initial_limit_state(ops, p0), config, dt, n, files); break;
    }
  } catch (const NumericalInstability& e) {
    RunResult partial;
    partial.dt = dt;
    flush(partial, "aborted", e.what());
    throw;
  }
  flush(r, "completed", "");
  return r;
}

// Sweep report --------------------------------------------------------------------

std::string SweepReport::csv() const {
  std::string s =
      "eps,err_phi_H1,err_psi_H1,err_z_H2,err_theta_H2,err_v_H2,sup_E_frak,sup_err_phi_H1,sup_err_psi_H1,"
      "sup_err_z_H2,dt\n";
  for (const SweepRow& r : rows) {
    for (double x : {r.eps, r.err_phi_H1, r.err_psi_H1, r.err_z_H2, r.err_theta_H2, r.err_v_H2, r.sup_E_frak,
                     r.sup_err_phi_H1, r.sup_err_psi_H1, r.sup_err_z_H2})
      s += g17(x) + ",";
    s += g17(r.dt) + "\n";
  }
  return s;
}

json SweepReport::json() const {
  nlohmann::json rs = nlohmann::json::array();
  for (const SweepRow& r : rows)
    rs.push_back({{"eps", r.eps},
                  {"err_phi_H1", r.err_phi_H1},
                  {"err_psi_H1", r.err_psi_H1},
                  {"err_z_H2", r.err_z_H2},
                  {"err_theta_H2", r.err_theta_H2},
                  {"err_v_H2", r.err_v_H2},
                  {"sup_E_frak", r.sup_E_frak},
                  {"sup_err_phi_H1", r.sup_err_phi_H1},
                  {"sup_err_psi_H1", r.sup_err_psi_H1},
                  {"sup_err_z_H2", r.sup_err_z_H2},
                  {"dt", r.dt}});
  return {{"rows", rs},
          {"metadata", metadata},
          {"uniform_bound",
           {{"ratio_max_over_min_sup_E_frak", uniform_bound_ratio}, {"limit", 4.0}, {"pass", uniform_bound_ratio <= 4.0}}}};
}

nlohmann::json SweepReport::plot_manifest() const {
  return {{"data", "sweep.csv"},
          {"x", {{"column", "eps"}, {"scale", "log"}}},
          {"y",
           {{{"column", "err_phi_H1"}, {"scale", "log"}, {"role", "slow error"}},
            {{"column", "err_psi_H1"}, {"scale", "log"}, {"role", "fast error"}},
            {{"column", "err_z_H2"}, {"scale", "log"}, {"role", "fast error"}},
            {{"column", "err_theta_H2"}, {"scale", "log"}, {"role", "composed error"}},
            {{"column", "err_v_H2"}, {"scale", "log"}, {"role", "composed error"}},
            {{"column", "sup_E_frak"}, {"scale", "log"}, {"role", "energy bound"}}}}};
}

void SweepReport::write(const fs::path& dir) const {
  write_text(dir / "sweep.csv", csv());
  write_text(dir / "sweep.json", json().dump(2) + "\n");
  write_text(dir / "plot_manifest.json", plot_manifest().dump(2) + "\n");
}

SweepReport run_eps_sweep(const RunConfig& config) { return sweep_impl(config).report; }

// Linear validation ---------------------------------------------------------------

nlohmann::json LinearReport::json() const {
  return {{"phi_drift", phi_drift},       {"h_drift", h_drift},         {"psi_plus_drift", psi_plus_drift},
          {"z_plus_drift", z_plus_drift}, {"state_error", state_error}, {"w_error", w_error},
          {"steps", steps},               {"dt", dt}};
}

LinearReport run_linear_validation(const RunConfig& config) {
  RunConfig cfg = config;
  cfg.integrator.tendency.nonlinear = false;
  cfg.validate();
  if (cfg.formulation == Formulation::limit) throw ConfigError("linear-check needs an eps formulation");
  const ChannelGrid grid = cfg.grid.make();
  const ChannelOps ops(grid);
  const double eps = cfg.eps.front();
  const PrimitiveState p0 = generate_initial(ops, cfg.initial, eps);
  GPVState g0 = extract_gpv(ops, p0);
  g0.eps = eps;
  const FastPair f0 = fast_filter(g0);

  LinearReport rep;
  rep.dt = choose_dt(ops, p0, cfg, eps);
  rep.steps = steps_for(cfg.t_end, rep.dt);

  const auto max_diff = [](const auto& a, const auto& b) {
    double m = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) m = std::max(m, static_cast<double>(std::abs(a[n] - b[n])));
    return m;
  };
  const auto vmax = [&](const auto& a, const auto& b) { return std::max(max_diff(a.x1, b.x1), max_diff(a.x2, b.x2)); };

  GPVState g = g0;
  PrimitiveState p = p0;
  for (int step = 1; step <= rep.steps; ++step) {
    const double t = step * rep.dt;
    if (cfg.formulation == Formulation::gpv) {
      g = step_eps_gpv(ops, g, rep.dt, cfg.integrator);
    } else {
      p = step_eps_primitive(ops, p, rep.dt, cfg.integrator);
      g = extract_gpv(ops, p);
    }
    g.t = t;
    g.eps = eps;
    rep.phi_drift = std::max(rep.phi_drift, max_diff(g.Phi, g0.Phi));
    rep.h_drift = std::max({rep.h_drift, max_diff(g.H0, g0.H0), max_diff(g.Hh, g0.Hh)});
    const FastPair f = fast_filter(g);
    rep.psi_plus_drift = std::max(rep.psi_plus_drift, vmax(f.Psi_plus, f0.Psi_plus));
    rep.z_plus_drift = std::max(rep.z_plus_drift, vmax(f.Z_plus, f0.Z_plus));

    // Closed form: Phi and the traces frozen, Psi and Z rotated by -t/eps.
    GPVState exact = g0;
    exact.Psi = rotation_phase(g0.Psi, t / eps);
    exact.Z = rotation_phase(g0.Z, t / eps);
    const PrimitiveState pe = reconstruct_unchecked(ops, exact);
    const PrimitiveState pn = cfg.formulation == Formulation::gpv ? reconstruct_unchecked(ops, g) : p;
    rep.state_error =
        std::max({rep.state_error, vmax(pn.v, pe.v), max_diff(pn.w, pe.w), max_diff(pn.theta, pe.theta)});
    const ScalarField w_l = ops.inv_laplace_dirichlet(ops.div_h(exact.Psi));
    rep.w_error = std::max(rep.w_error, max_diff(pn.w, w_l));
  }
  return rep;
}

// Well-prepared comparison --------------------------------------------------------

nlohmann::json WellPreparedReport::json() const {
  return {{"sweep", sweep.json()},
          {"order", order},
          {"max_fast_error", max_fast_error},
          {"phi_p_max_drift", phi_p_max_drift}};
}

WellPreparedReport run_wellprepared_comparison(const RunConfig& config) {
  if (config.initial.kind != InitialDataSpec::Kind::balanced)
    throw ConfigError("qg-compare needs balanced initial data (initial_data.kind = \"balanced\")");
  SweepRun run = sweep_impl(config);
  WellPreparedReport rep;
  rep.sweep = std::move(run.report);
  std::vector<double> e, err;
  for (const SweepRow& r : rep.sweep.rows) {
    e.push_back(r.eps);
    err.push_back(r.err_phi_H1);
    rep.max_fast_error = std::max({rep.max_fast_error, r.err_psi_H1, r.err_z_H2, r.sup_err_psi_H1, r.sup_err_z_H2});
  }
  const bool all_positive = std::all_of(err.begin(), err.end(), [](double x) { return x > 0.0; });
  rep.order = all_positive ? loglog_slope(e, err) : std::numeric_limits<double>::quiet_NaN();
  const double m0 = run.limit_samples.front().Phi_p.max_abs();
  for (const LimitState& L : run.limit_samples)
    rep.phi_p_max_drift = std::max(rep.phi_p_max_drift, m0 > 0.0 ? std::abs(L.Phi_p.max_abs() - m0) / m0 : 0.0);
  return rep;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ConfigError("loglog_slope: need at least two matching points");
  double mx = 0, my = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ConfigError("loglog_slope: values must be positive");
    mx += std::log(x[i]) / n;
    my += std::log(y[i]) / n;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace gqg
