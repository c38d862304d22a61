#pragma once

#include "gqg/field.hpp"
#include "gqg/ops.hpp"
#include "gqg/states.hpp"
#include "gqg/tendencies.hpp"

namespace gqg {

struct IntegratorConfig {
  double dt = 0.0;  // <= 0 selects stable_dt
  double cfl = 0.5;
  double eps_resolution = 0.5;
  double dt_max = 0.05;
  double t_end = 1.0;
  bool constraint_projection = true;
  bool check_cfl = true;
  double div_tol = 1e-8;
  TendencyOptions tendency{};

  void validate() const;
};

// Magnitudes removed by the constraint projection after one GPV step.
struct ProjectionLog {
  double mean_correction = 0.0;    // max |mean_h(Psi) + dz Z| before the fix
  double compat_correction = 0.0;  // constant removed from Phi
};

// Exact propagator of dX/dt + X^perp / eps = 0 over a time dt: rotation by -dt/eps.
HVectorField rotation_phase(const HVectorField& x, double dt_over_eps);
VProfile rotation_phase(const VProfile& x, double dt_over_eps);

GPVState step_eps_gpv(const ChannelOps& ops, const GPVState& g, double dt, const IntegratorConfig& cfg = {},
                      ProjectionLog* log = nullptr);
// Returns the divergence removed by cleaning through *cleaned (0 if none).
PrimitiveState step_eps_primitive(const ChannelOps& ops, const PrimitiveState& p, double dt,
                                  const IntegratorConfig& cfg = {}, double* cleaned = nullptr);
LimitState step_limit(const ChannelOps& ops, const LimitState& L, double dt, const IntegratorConfig& cfg = {},
                      double* compat_removed = nullptr);

// Enforces mean_h(Psi) = -dz Z and int Phi = int (Hh - H0) in place.
ProjectionLog project_constraints(const ChannelOps& ops, GPVState& g);

double stable_dt(const ChannelOps& ops, const PrimitiveState& p, const IntegratorConfig& cfg);
double stable_dt(const ChannelOps& ops, const GPVState& g, const IntegratorConfig& cfg);
double stable_dt(const ChannelOps& ops, const LimitState& L, const IntegratorConfig& cfg);
// Advective bound alone: cfl / max over nodes of (|v1|/dx, |v2|/dy, |w|/dz_local).
double advective_dt(const ChannelOps& ops, const HVectorField& v, const ScalarField* w, double cfl);

}  // namespace gqg
