#pragma once

#include "gqg/field.hpp"
#include "gqg/gpv.hpp"
#include "gqg/ops.hpp"
#include "gqg/states.hpp"

namespace gqg {

struct TendencyOptions {
  // false zeroes N1, N2, N3 and every advection term (linear regime).
  bool nonlinear = true;
};

// Soft part of the GPV right-hand side; the stiff (1/eps) rotation of Psi and
// Z belongs to the integrator.
struct GPVTendency {
  ScalarField dPhi;
  HVectorField dPsi_soft;
  BoundaryField dH0, dHh;
  VProfile dZ_soft;
};

struct PrimitiveTendency {
  HVectorField dv;
  ScalarField dw;
  ScalarField dtheta;
  // Neumann solvability defect of the k = 0 pressure column (handled directly).
  double pressure_defect = 0.0;
};

struct LimitTendency {
  ScalarField dPhi_p;
  BoundaryField dHp0, dHph;
  CHVectorField dpsi_p;
  CVProfile dz_p;
};

ScalarField nonlinear_N1(const ChannelOps& ops, const PrimitiveState& p);
HVectorField nonlinear_N2(const ChannelOps& ops, const PrimitiveState& p);
VProfile nonlinear_N3(const ChannelOps& ops, const PrimitiveState& p);

GPVTendency gpv_tendency(const ChannelOps& ops, const GPVState& g, const TendencyOptions& opt = {});
PrimitiveTendency primitive_tendency(const ChannelOps& ops, const PrimitiveState& p, const TendencyOptions& opt = {});

ScalarField limit_N_phi(const ChannelOps& ops, const LimitState& L);
CHVectorField limit_N_psi(const ChannelOps& ops, const LimitState& L);
CVProfile limit_N_z(const ChannelOps& ops, const LimitState& L);
LimitTendency limit_tendency(const ChannelOps& ops, const LimitState& L, const TendencyOptions& opt = {});

// Leray-type cleaning: subtract grad phi with Delta phi = div u, dz phi = 0 on
// the walls; the horizontal-mean w is reset to zero. Returns the L2
// divergence before cleaning.
double clean_divergence(const ChannelOps& ops, PrimitiveState& p);

}  // namespace gqg
