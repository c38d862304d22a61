#pragma once

#include <optional>
#include <utility>

#include "gqg/field.hpp"
#include "gqg/ops.hpp"
#include "gqg/states.hpp"

namespace gqg {

// Psi_+ = e^{-it/eps}(Psi + i Psi^perp), Z_+ likewise. The "-" branch is the conjugate.
struct FastPair {
  CHVectorField Psi_plus;
  CVProfile Z_plus;
};

struct FastComponents {
  CHVectorField V_plus;
  CScalarField W_plus;
  CScalarField Theta_plus;
};

struct SlowComponents {
  HVectorField v_p;
  ScalarField theta_p;
};

// With a tolerance the input is validated first and a ConstraintViolation
// carrying (div, bc) residuals is thrown on failure.
GPVState extract_gpv(const ChannelOps& ops, const PrimitiveState& p, std::optional<double> tol = std::nullopt);
// Rejects states whose mean or compatibility residual exceeds tol * (1 + size of the state).
PrimitiveState reconstruct_primitive(const ChannelOps& ops, const GPVState& g, double tol = kDefaultTol);
// Same formulas without the constraint check; the inversion never reads the
// horizontal mean of Psi nor the vertical mean of Phi, so the result is well
// defined for any input.
PrimitiveState reconstruct_unchecked(const ChannelOps& ops, const GPVState& g);

FastPair fast_filter(const GPVState& g);
FastPair fast_filter(const HVectorField& Psi, const VProfile& Z, double t, double eps);
// Inverse: Psi = Re(e^{it/eps} Psi_+), Z = Re(e^{it/eps} Z_+).
std::pair<HVectorField, VProfile> fast_unfilter(const FastPair& f, double t, double eps);

SlowComponents limit_reconstruct_slow(const ChannelOps& ops, const LimitState& L, bool check = false,
                                      double tol = kDefaultTol);
FastComponents limit_reconstruct_fast(const ChannelOps& ops, const LimitState& L);
PrimitiveState compose_approximation(const ChannelOps& ops, const LimitState& L, double t, double eps);

// Limit state implied by the data: Phi_p and traces copied, envelopes from fast_filter.
LimitState project_to_limit(const GPVState& g);

}  // namespace gqg
