#include "gqg/integrators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gqg/errors.hpp"
#include "gqg/gpv.hpp"

namespace gqg {

void IntegratorConfig::validate() const {
  if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError("integrator: cfl must lie in (0, 1]");
  if (!(eps_resolution > 0.0)) throw ConfigError("integrator: eps_resolution must be positive");
  if (!(dt_max > 0.0)) throw ConfigError("integrator: dt_max must be positive");
  if (!std::isfinite(dt)) throw ConfigError("integrator: dt must be finite");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("integrator: t_end must be nonnegative");
}

namespace {

template <class F>
Vec2<F> rotate(const Vec2<F>& x, double phi) {
  const double c = std::cos(phi), s = std::sin(phi);
  Vec2<F> r{F(x.x1.shape()), F(x.x1.shape())};
  for (std::size_t n = 0; n < x.x1.size(); ++n) {
    // c X - s X^perp, X^perp = (-X2, X1)
    r.x1[n] = c * x.x1[n] + s * x.x2[n];
    r.x2[n] = c * x.x2[n] - s * x.x1[n];
  }
  return r;
}

void require_dt(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("time step must be positive and finite");
}

void check_step(const ChannelOps& ops, double dt, double limit, const char* who) {
  (void)ops;
  if (dt > limit * (1.0 + 1e-12))
    throw NumericalInstability(std::string(who) + ": dt = " + std::to_string(dt) + " exceeds the stability bound " +
                               std::to_string(limit));
}

// y + a k for the GPV variables.
GPVState gpv_axpy(const GPVState& y, double a, const GPVTendency& k) {
  GPVState r = y;
  r.Phi.add_scaled(a, k.dPhi);
  r.Psi.add_scaled(a, k.dPsi_soft);
  r.H0.add_scaled(a, k.dH0);
  r.Hh.add_scaled(a, k.dHh);
  r.Z.add_scaled(a, k.dZ_soft);
  return r;
}

GPVTendency rotate(const GPVTendency& k, double phi) {
  GPVTendency r = k;
  r.dPsi_soft = rotate(k.dPsi_soft, phi);
  r.dZ_soft = rotate(k.dZ_soft, phi);
  return r;
}

GPVState rotate(const GPVState& g, double phi) {
  GPVState r = g;
  r.Psi = rotate(g.Psi, phi);
  r.Z = rotate(g.Z, phi);
  return r;
}

}  // namespace

HVectorField rotation_phase(const HVectorField& x, double dt_over_eps) { return rotate(x, dt_over_eps); }
VProfile rotation_phase(const VProfile& x, double dt_over_eps) { return rotate(x, dt_over_eps); }

ProjectionLog project_constraints(const ChannelOps& ops, GPVState& g) {
  ProjectionLog log;
  const VProfile m = ops.horizontal_mean(g.Psi);
  VProfile fix = ops.ddz(g.Z);
  fix += m;
  fix *= -1.0;  // the amount added to mean_h(Psi)
  log.mean_correction = fix.max_abs();
  g.Psi += ops.broadcast(fix);
  const double defect = integrate(ops, g.Phi) - (integrate(ops, g.Hh) - integrate(ops, g.H0));
  const double c = defect / ops.grid().h();
  for (std::size_t n = 0; n < g.Phi.size(); ++n) g.Phi[n] -= c;
  log.compat_correction = std::abs(c);
  return log;
}

GPVState step_eps_gpv(const ChannelOps& ops, const GPVState& g, double dt, const IntegratorConfig& cfg,
                      ProjectionLog* log) {
  require_dt(dt);
  if (!(g.eps > 0.0)) throw ConfigError("step_eps_gpv: eps must be positive");
  if (cfg.check_cfl) check_step(ops, dt, stable_dt(ops, g, cfg), "step_eps_gpv");
  const double half = 0.5 * dt / g.eps, full = dt / g.eps;
  const TendencyOptions& opt = cfg.tendency;

  const GPVTendency k1 = gpv_tendency(ops, g, opt);
  GPVState y = rotate(gpv_axpy(g, 0.5 * dt, k1), half);
  y.t = g.t + 0.5 * dt;
  const GPVTendency k2 = gpv_tendency(ops, y, opt);
  const GPVState gh = rotate(g, half);
  y = gpv_axpy(gh, 0.5 * dt, k2);
  const GPVTendency k3 = gpv_tendency(ops, y, opt);
  y = gpv_axpy(rotate(g, full), dt, rotate(k3, half));
  y.t = g.t + dt;
  const GPVTendency k4 = gpv_tendency(ops, y, opt);

  GPVState out = rotate(g, full);
  out = gpv_axpy(out, dt / 6.0, rotate(k1, full));
  out = gpv_axpy(out, dt / 3.0, rotate(k2, half));
  out = gpv_axpy(out, dt / 3.0, rotate(k3, half));
  out = gpv_axpy(out, dt / 6.0, k4);
  out.t = g.t + dt;

  if (!out.Phi.all_finite() || !out.Psi.all_finite())
    throw NumericalInstability("step_eps_gpv: non-finite values after the step");
  if (cfg.constraint_projection) {
    const ProjectionLog pl = project_constraints(ops, out);
    if (log) *log = pl;
  } else if (log) {
    *log = {};
  }
  return out;
}

namespace {

PrimitiveState prim_axpy(const PrimitiveState& y, double a, const PrimitiveTendency& k) {
  PrimitiveState r = y;
  r.v.add_scaled(a, k.dv);
  r.w.add_scaled(a, k.dw);
  r.theta.add_scaled(a, k.dtheta);
  return r;
}

}  // namespace

PrimitiveState step_eps_primitive(const ChannelOps& ops, const PrimitiveState& p, double dt,
                                  const IntegratorConfig& cfg, double* cleaned) {
  require_dt(dt);
  if (!(p.eps > 0.0)) throw ConfigError("step_eps_primitive: eps must be positive");
  if (cfg.check_cfl) check_step(ops, dt, stable_dt(ops, p, cfg), "step_eps_primitive");
  const TendencyOptions& opt = cfg.tendency;
  const PrimitiveTendency k1 = primitive_tendency(ops, p, opt);
  const PrimitiveTendency k2 = primitive_tendency(ops, prim_axpy(p, 0.5 * dt, k1), opt);
  const PrimitiveTendency k3 = primitive_tendency(ops, prim_axpy(p, 0.5 * dt, k2), opt);
  const PrimitiveTendency k4 = primitive_tendency(ops, prim_axpy(p, dt, k3), opt);
  PrimitiveState out = prim_axpy(p, dt / 6.0, k1);
  out = prim_axpy(out, dt / 3.0, k2);
  out = prim_axpy(out, dt / 3.0, k3);
  out = prim_axpy(out, dt / 6.0, k4);
  out.t = p.t + dt;
  if (!out.theta.all_finite() || !out.v.all_finite())
    throw NumericalInstability("step_eps_primitive: non-finite values after the step");

  double removed = 0.0;
  if (validate_primitive(ops, out, cfg.div_tol).div_residual > cfg.div_tol) removed = clean_divergence(ops, out);
  if (cleaned) *cleaned = removed;
  return out;
}

namespace {

LimitState limit_axpy(const LimitState& y, double a, const LimitTendency& k) {
  LimitState r = y;
  r.Phi_p.add_scaled(a, k.dPhi_p);
  r.Hp0.add_scaled(a, k.dHp0);
  r.Hph.add_scaled(a, k.dHph);
  r.psi_p.add_scaled(cplx(a), k.dpsi_p);
  r.z_p.add_scaled(cplx(a), k.dz_p);
  return r;
}

}  // namespace

LimitState step_limit(const ChannelOps& ops, const LimitState& L, double dt, const IntegratorConfig& cfg,
                      double* compat_removed) {
  require_dt(dt);
  if (cfg.check_cfl) check_step(ops, dt, stable_dt(ops, L, cfg), "step_limit");
  const TendencyOptions& opt = cfg.tendency;
  const LimitTendency k1 = limit_tendency(ops, L, opt);
  const LimitTendency k2 = limit_tendency(ops, limit_axpy(L, 0.5 * dt, k1), opt);
  const LimitTendency k3 = limit_tendency(ops, limit_axpy(L, 0.5 * dt, k2), opt);
  const LimitTendency k4 = limit_tendency(ops, limit_axpy(L, dt, k3), opt);
  LimitState out = limit_axpy(L, dt / 6.0, k1);
  out = limit_axpy(out, dt / 3.0, k2);
  out = limit_axpy(out, dt / 3.0, k3);
  out = limit_axpy(out, dt / 6.0, k4);
  out.t = L.t + dt;
  if (!out.Phi_p.all_finite()) throw NumericalInstability("step_limit: non-finite values after the step");
  double c = 0.0;
  if (cfg.constraint_projection) {
    c = (integrate(ops, out.Phi_p) - (integrate(ops, out.Hph) - integrate(ops, out.Hp0))) / ops.grid().h();
    for (std::size_t n = 0; n < out.Phi_p.size(); ++n) out.Phi_p[n] -= c;
  }
  if (compat_removed) *compat_removed = std::abs(c);
  return out;
}

double advective_dt(const ChannelOps& ops, const HVectorField& v, const ScalarField* w, double cfl) {
  const ChannelGrid& g = ops.grid();
  const double dx = 1.0 / g.nx(), dy = 1.0 / g.ny();
  std::vector<double> dzl(g.nzp());
  for (int k = 0; k <= g.nz(); ++k) {
    const double lo = k > 0 ? g.z(k) - g.z(k - 1) : std::numeric_limits<double>::infinity();
    const double hi = k < g.nz() ? g.z(k + 1) - g.z(k) : std::numeric_limits<double>::infinity();
    dzl[k] = std::min(lo, hi);
  }
  double rate = 0.0;
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j)
      for (int k = 0; k < g.nzp(); ++k) {
        const double a = std::abs(v.x1(i, j, k)) / dx, b = std::abs(v.x2(i, j, k)) / dy;
        const double c = w ? std::abs((*w)(i, j, k)) / dzl[k] : 0.0;
        if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c))
          throw NumericalInstability("stable_dt: non-finite velocity");
        rate = std::max({rate, a, b, c});
      }
  return rate > 0.0 ? cfl / rate : std::numeric_limits<double>::infinity();
}

double stable_dt(const ChannelOps& ops, const PrimitiveState& p, const IntegratorConfig& cfg) {
  const double adv = advective_dt(ops, p.v, &p.w, cfg.cfl);
  return std::min({adv, cfg.eps_resolution * p.eps, cfg.dt_max});
}

double stable_dt(const ChannelOps& ops, const GPVState& g, const IntegratorConfig& cfg) {
  return stable_dt(ops, reconstruct_unchecked(ops, g), cfg);
}

double stable_dt(const ChannelOps& ops, const LimitState& L, const IntegratorConfig& cfg) {
  const SlowComponents s = limit_reconstruct_slow(ops, L);
  return std::min(advective_dt(ops, s.v_p, nullptr, cfg.cfl), cfg.dt_max);
}

}  // namespace gqg
