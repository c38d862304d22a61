#include "gqg/gpv.hpp"

#include <algorithm>
#include <cmath>

#include "gqg/errors.hpp"

namespace gqg {

namespace {

// Horizontal size used to scale the acceptance tolerance of constraint checks.
double state_scale(const GPVState& g) {
  return std::max({g.Phi.max_abs(), g.Psi.max_abs(), g.H0.max_abs(), g.Hh.max_abs(), g.Z.max_abs()});
}

Spectrum laplace3_spec(const ChannelOps& ops, const Spectrum& s) {
  Spectrum r = ops.sdz(ops.sdz(s));
  const ChannelGrid& g = ops.grid();
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.nyh(); ++j) {
      const double m = ops.ksq(i, j);
      for (int k = 0; k < g.nzp(); ++k) r(i, j, k) -= m * s(i, j, k);
    }
  return r;
}

// a (ik)/|k|^2 + b (ik)^perp/|k|^2 per mode, with the k = 0 column set to z0.
void horizontal_lift(const ChannelOps& ops, const Spectrum& a, const Spectrum* b, const VProfile* z0, Spectrum& v1,
                     Spectrum& v2) {
  const ChannelGrid& g = ops.grid();
  v1 = Spectrum::zeros(g);
  v2 = Spectrum::zeros(g);
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.nyh(); ++j) {
      if (i == 0 && j == 0) continue;
      const double inv = 1.0 / ops.ksq(i, j);
      const cplx ax = ops.ikx(i) * inv, ay = ops.iky(j) * inv;
      for (int k = 0; k < g.nzp(); ++k) {
        cplx r1 = ax * a(i, j, k), r2 = ay * a(i, j, k);
        if (b) {
          r1 -= ay * (*b)(i, j, k);
          r2 += ax * (*b)(i, j, k);
        }
        v1(i, j, k) = r1;
        v2(i, j, k) = r2;
      }
    }
  if (z0)
    for (int k = 0; k < g.nzp(); ++k) {
      v1(0, 0, k) = z0->x1[k];
      v2(0, 0, k) = z0->x2[k];
    }
}

void pin_walls(const ChannelGrid& g, ScalarField& f, const BoundaryField* bottom, const BoundaryField* top) {
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j) {
      f(i, j, 0) = bottom ? (*bottom)(i, j, 0) : 0.0;
      f(i, j, g.nz()) = top ? (*top)(i, j, 0) : 0.0;
    }
}

// theta = E_b + Delta_D^{-1}(extra + dz Phi - Delta E_b), in spectral space.
Spectrum invert_theta(const ChannelOps& ops, const Spectrum& phi, const Spectrum* extra, const BoundaryField& h0,
                      const BoundaryField& hh) {
  const Spectrum e = ops.forward(ops.extend_boundary(h0, hh));
  Spectrum rhs = ops.sdz(phi);
  if (extra) rhs += *extra;
  rhs -= laplace3_spec(ops, e);
  Spectrum th = ops.inv_laplace_dirichlet(rhs);
  th += e;
  return th;
}

struct RealFast {
  HVectorField V;
  ScalarField W, Theta;
};

RealFast fast_fields(const ChannelOps& ops, const HVectorField& psi, const VProfile& z) {
  const Spectrum p1 = ops.forward(psi.x1), p2 = ops.forward(psi.x2);
  Spectrum div = ops.sdx(p1);
  div += ops.sdy(p2);
  Spectrum curl = ops.sdx(p2);
  curl -= ops.sdy(p1);
  const Spectrum w = ops.inv_laplace_dirichlet(div);
  const Spectrum th = ops.inv_laplace_dirichlet(curl);
  // -grad Delta_h^{-1} dz w - grad^perp Delta_h^{-1} dz th, i.e. (ik dz w + (ik)^perp dz th)/|k|^2
  Spectrum v1, v2;
  const Spectrum dth = ops.sdz(th);
  horizontal_lift(ops, ops.sdz(w), &dth, &z, v1, v2);
  RealFast r{{ops.backward(v1), ops.backward(v2)}, ops.backward(w), ops.backward(th)};
  r.V *= 0.5;
  r.W *= 0.5;
  r.Theta *= 0.5;
  pin_walls(ops.grid(), r.W, nullptr, nullptr);
  return r;
}

}  // namespace

GPVState extract_gpv(const ChannelOps& ops, const PrimitiveState& p, std::optional<double> tol) {
  if (tol) {
    const PrimitiveReport rep = validate_primitive(ops, p, *tol);
    if (!rep.pass)
      throw ConstraintViolation("extract_gpv: primitive state is not solenoidal/impermeable", rep.div_residual,
                                rep.bc_residual);
  }
  const Spectrum v1 = ops.forward(p.v.x1), v2 = ops.forward(p.v.x2);
  const Spectrum w = ops.forward(p.w), th = ops.forward(p.theta);

  GPVState g;
  Spectrum phi = ops.sdz(th);
  phi += ops.sdx(v2);
  phi -= ops.sdy(v1);
  g.Phi = ops.backward(phi);

  Spectrum s1 = ops.sdx(w);
  s1 -= ops.sdy(th);
  s1 -= ops.sdz(v1);
  Spectrum s2 = ops.sdy(w);
  s2 += ops.sdx(th);
  s2 -= ops.sdz(v2);
  g.Psi = {ops.backward(s1), ops.backward(s2)};

  g.H0 = ops.bottom(p.theta);
  g.Hh = ops.top(p.theta);
  g.Z = ops.horizontal_mean(p.v);
  g.t = p.t;
  g.eps = p.eps;
  return g;
}

PrimitiveState reconstruct_unchecked(const ChannelOps& ops, const GPVState& g) {
  const ChannelGrid& grid = ops.grid();
  const Spectrum p1 = ops.forward(g.Psi.x1), p2 = ops.forward(g.Psi.x2);
  const Spectrum phi = ops.forward(g.Phi);

  Spectrum div = ops.sdx(p1);
  div += ops.sdy(p2);
  Spectrum curl = ops.sdx(p2);
  curl -= ops.sdy(p1);

  const Spectrum w = ops.inv_laplace_dirichlet(div);
  const Spectrum th = invert_theta(ops, phi, &curl, g.H0, g.Hh);

  // grad^perp Delta_h^{-1} (Phi - dz theta) = (ik)^perp (dz theta - Phi)/|k|^2
  Spectrum q = ops.sdz(th);
  q -= phi;
  Spectrum v1, v2;
  horizontal_lift(ops, ops.sdz(w), &q, &g.Z, v1, v2);

  PrimitiveState p;
  p.v = {ops.backward(v1), ops.backward(v2)};
  p.w = ops.backward(w);
  p.theta = ops.backward(th);
  pin_walls(grid, p.w, nullptr, nullptr);
  pin_walls(grid, p.theta, &g.H0, &g.Hh);
  p.t = g.t;
  p.eps = g.eps;
  return p;
}

PrimitiveState reconstruct_primitive(const ChannelOps& ops, const GPVState& g, double tol) {
  const GPVReport rep = validate_gpv(ops, g, tol * (1.0 + state_scale(g)));
  if (!rep.pass)
    throw ConstraintViolation("reconstruct_primitive: GPV state violates the mean/compatibility constraints",
                              rep.mean_residual, rep.compat_residual);
  return reconstruct_unchecked(ops, g);
}

FastPair fast_filter(const HVectorField& Psi, const VProfile& Z, double t, double eps) {
  const cplx ph = std::exp(cplx(0.0, -t / eps));
  const cplx I(0.0, 1.0);
  FastPair f;
  f.Psi_plus.x1 = CScalarField(Psi.x1.shape());
  f.Psi_plus.x2 = CScalarField(Psi.x1.shape());
  for (std::size_t n = 0; n < Psi.x1.size(); ++n) {
    f.Psi_plus.x1[n] = ph * (Psi.x1[n] - I * Psi.x2[n]);
    f.Psi_plus.x2[n] = ph * (Psi.x2[n] + I * Psi.x1[n]);
  }
  f.Z_plus.x1 = ComplexColumn(Z.x1.shape());
  f.Z_plus.x2 = ComplexColumn(Z.x1.shape());
  for (std::size_t n = 0; n < Z.x1.size(); ++n) {
    f.Z_plus.x1[n] = ph * (Z.x1[n] - I * Z.x2[n]);
    f.Z_plus.x2[n] = ph * (Z.x2[n] + I * Z.x1[n]);
  }
  return f;
}

FastPair fast_filter(const GPVState& g) { return fast_filter(g.Psi, g.Z, g.t, g.eps); }

std::pair<HVectorField, VProfile> fast_unfilter(const FastPair& f, double t, double eps) {
  const cplx ph = std::exp(cplx(0.0, t / eps));
  auto un = [&](const auto& c) {
    auto r = real_part(c);
    for (std::size_t n = 0; n < c.size(); ++n) r[n] = (ph * c[n]).real();
    return r;
  };
  return {HVectorField{un(f.Psi_plus.x1), un(f.Psi_plus.x2)}, VProfile{un(f.Z_plus.x1), un(f.Z_plus.x2)}};
}

SlowComponents limit_reconstruct_slow(const ChannelOps& ops, const LimitState& L, bool check, double tol) {
  if (check) {
    const LimitReport rep = validate_limit(ops, L, tol * (1.0 + L.Phi_p.max_abs()));
    if (!rep.pass)
      throw ConstraintViolation("limit_reconstruct_slow: compatibility violated", rep.compat_residual, 0.0);
  }
  const Spectrum phi = ops.forward(L.Phi_p);
  const Spectrum th = invert_theta(ops, phi, nullptr, L.Hp0, L.Hph);
  Spectrum q = ops.sdz(th);
  q -= phi;
  const Spectrum zero = Spectrum::zeros(ops.grid());
  Spectrum v1, v2;
  horizontal_lift(ops, zero, &q, nullptr, v1, v2);
  SlowComponents s{{ops.backward(v1), ops.backward(v2)}, ops.backward(th)};
  pin_walls(ops.grid(), s.theta_p, &L.Hp0, &L.Hph);
  return s;
}

FastComponents limit_reconstruct_fast(const ChannelOps& ops, const LimitState& L) {
  const RealFast re = fast_fields(ops, real_part(L.psi_p), real_part(L.z_p));
  const RealFast im = fast_fields(ops, imag_part(L.psi_p), imag_part(L.z_p));
  return {make_complex(re.V, im.V), make_complex(re.W, im.W), make_complex(re.Theta, im.Theta)};
}

PrimitiveState compose_approximation(const ChannelOps& ops, const LimitState& L, double t, double eps) {
  const SlowComponents s = limit_reconstruct_slow(ops, L);
  const FastComponents f = limit_reconstruct_fast(ops, L);
  const cplx ph = std::exp(cplx(0.0, t / eps));
  auto twice_re = [&](const CScalarField& c) {
    ScalarField r(c.shape());
    for (std::size_t n = 0; n < c.size(); ++n) r[n] = 2.0 * (ph * c[n]).real();
    return r;
  };
  PrimitiveState p;
  p.v = s.v_p + HVectorField{twice_re(f.V_plus.x1), twice_re(f.V_plus.x2)};
  p.w = twice_re(f.W_plus);
  p.theta = s.theta_p + twice_re(f.Theta_plus);
  p.t = t;
  p.eps = eps;
  return p;
}

LimitState project_to_limit(const GPVState& g) {
  const FastPair f = fast_filter(g);
  return {g.Phi, g.H0, g.Hh, f.Psi_plus, f.Z_plus, g.t};
}

}  // namespace gqg
