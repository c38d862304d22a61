#pragma once

#include <cmath>
#include <functional>
#include <initializer_list>
#include <string>
#include <variant>

#include "gqg/field.hpp"
#include "gqg/ops.hpp"

namespace gqg {

struct PrimitiveState {
  HVectorField v;
  ScalarField w;
  ScalarField theta;
  double t = 0.0;
  double eps = 1.0;

  static PrimitiveState zeros(const ChannelGrid& g, double eps = 1.0) {
    return {HVectorField::zeros(g), ScalarField::zeros(g), ScalarField::zeros(g), 0.0, eps};
  }
};

struct GPVState {
  ScalarField Phi;
  HVectorField Psi;
  BoundaryField H0, Hh;
  VProfile Z;
  double t = 0.0;
  double eps = 1.0;

  static GPVState zeros(const ChannelGrid& g, double eps = 1.0) {
    return {ScalarField::zeros(g), HVectorField::zeros(g), BoundaryField::zeros(g), BoundaryField::zeros(g),
            VProfile::zeros(g), 0.0, eps};
  }
};

// psi_p and z_p hold the "+" envelopes; the "-" branch is their conjugate.
struct LimitState {
  ScalarField Phi_p;
  BoundaryField Hp0, Hph;
  CHVectorField psi_p;
  CVProfile z_p;
  double t = 0.0;

  static LimitState zeros(const ChannelGrid& g) {
    return {ScalarField::zeros(g), BoundaryField::zeros(g), BoundaryField::zeros(g), CHVectorField::zeros(g),
            CVProfile::zeros(g), 0.0};
  }
};

struct DiagnosticsRecord {
  double t = 0.0;
  double E_frak = 0.0;
  double l2_energy = 0.0;
  double h3_norm = 0.0;
  double div_residual = 0.0;
  double bc_residual = 0.0;
  double mean_residual = 0.0;
  double compat_residual = 0.0;

  static const char* csv_header();
  std::string csv_row() const;
  static DiagnosticsRecord parse_csv_row(const std::string& line);
  bool all_finite() const;
};

struct PrimitiveReport {
  double div_residual = 0.0;  // L2 norm of div_h v + dz w
  double bc_residual = 0.0;   // max |w| on the walls
  bool pass = true;
};

struct GPVReport {
  double mean_residual = 0.0;    // max_z |mean_h(Psi) + dz Z|
  double compat_residual = 0.0;  // |int Phi - int (Hh - H0)|
  bool pass = true;
};

struct LimitReport {
  double compat_residual = 0.0;
  bool pass = true;
};

inline constexpr double kDefaultTol = 1e-8;

PrimitiveReport validate_primitive(const ChannelOps& ops, const PrimitiveState& p, double tol = kDefaultTol);
GPVReport validate_gpv(const ChannelOps& ops, const GPVState& g, double tol = kDefaultTol);
LimitReport validate_limit(const ChannelOps& ops, const LimitState& L, double tol = kDefaultTol);

// Norms -------------------------------------------------------------------

using FieldRef = std::variant<std::reference_wrapper<const ScalarField>, std::reference_wrapper<const HVectorField>>;

// Squared H^s norm summed over all multi-indices |alpha| <= s.
double sobolev_norm_sq(const ChannelOps& ops, const ScalarField& f, int s);
double sobolev_norm_sq(const ChannelOps& ops, const HVectorField& f, int s);
double sobolev_norm_sq(const ChannelOps& ops, const CScalarField& f, int s);
double sobolev_norm_sq(const ChannelOps& ops, const CHVectorField& f, int s);
double sobolev_norm_sq(const ChannelOps& ops, const RealColumn& f, int s);
double sobolev_norm_sq(const ChannelOps& ops, const VProfile& f, int s);
double sobolev_norm_sq(const ChannelOps& ops, const CVProfile& f, int s);

// sqrt of the summed squares over the listed fields.
double sobolev_norm(const ChannelOps& ops, std::initializer_list<FieldRef> fields, int s);
template <class F>
double sobolev_norm(const ChannelOps& ops, const F& f, int s) {
  return std::sqrt(sobolev_norm_sq(ops, f, s));
}

// Fourier-weighted norm on T^2: sum_k (1 + 4 pi^2 |k|^2)^s |A_k|^2, then sqrt.
double boundary_norm(const ChannelOps& ops, const BoundaryField& a, double s);

// Volume integral by Clenshaw-Curtis in z and the trapezoid rule in x, y.
double integrate(const ChannelOps& ops, const ScalarField& f);
double integrate(const ChannelOps& ops, const BoundaryField& f);
double inner(const ChannelOps& ops, const ScalarField& a, const ScalarField& b);

double l2_energy(const ChannelOps& ops, const PrimitiveState& p);
double energy_functional(const ChannelOps& ops, const PrimitiveState& p);

// Maximum of |A| over T^2 for the trigonometric interpolant of A, not just
// at the nodes (refined by Newton iteration from a padded grid).
double trig_sup_norm(const ChannelOps& ops, const BoundaryField& a);

}  // namespace gqg
