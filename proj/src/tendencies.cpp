#include "gqg/tendencies.hpp"

#include <cmath>

#include "gqg/errors.hpp"

namespace gqg {

namespace {

struct Grad {
  ScalarField f, x, y, z;
};

Grad grad3(const ChannelOps& ops, const ScalarField& f) {
  const Spectrum s = ops.forward(f);
  return {f, ops.backward(ops.sdx(s)), ops.backward(ops.sdy(s)), ops.ddz(f)};
}

// Velocity, vertical velocity and buoyancy with their first derivatives.
struct Kin {
  Grad v1, v2, w, th;
};

Kin kinematics(const ChannelOps& ops, const HVectorField& v, const ScalarField& w, const ScalarField& th) {
  return {grad3(ops, v.x1), grad3(ops, v.x2), grad3(ops, w), grad3(ops, th)};
}

Kin kinematics(const ChannelOps& ops, const PrimitiveState& p) { return kinematics(ops, p.v, p.w, p.theta); }

// B1(a, b) = curl a.v div b.v + dz a.v . grad^perp b.w + dz a.v . grad b.th + dz a.w dz b.th;
// N1 = B1(u, u).
ScalarField bilinear1(const Kin& a, const Kin& b) {
  ScalarField r(a.v1.f.shape());
  for (std::size_t n = 0; n < r.size(); ++n) {
    const double curl = a.v2.x[n] - a.v1.y[n];
    const double div = b.v1.x[n] + b.v2.y[n];
    r[n] = curl * div + (-a.v1.z[n] * b.w.y[n] + a.v2.z[n] * b.w.x[n]) +
           (a.v1.z[n] * b.th.x[n] + a.v2.z[n] * b.th.y[n]) + a.w.z[n] * b.th.z[n];
  }
  return r;
}

// B2(a, b): the N2 product terms with the first factor taken from a and the
// second from b, so N2 = B2(u, u).
HVectorField bilinear2(const Kin& a, const Kin& b) {
  HVectorField r{ScalarField(a.v1.f.shape()), ScalarField(a.v1.f.shape())};
  for (std::size_t n = 0; n < r.x1.size(); ++n) {
    // (grad v)^T grad theta, component i = sum_j d_i v_j d_j theta
    const double c1 = a.v1.x[n] * b.th.x[n] + a.v2.x[n] * b.th.y[n];
    const double c2 = a.v1.y[n] * b.th.x[n] + a.v2.y[n] * b.th.y[n];
    double r1 = -c2, r2 = c1;
    r1 += -a.th.z[n] * b.w.y[n];
    r2 += a.th.z[n] * b.w.x[n];
    r1 += a.v1.x[n] * b.w.x[n] + a.v2.x[n] * b.w.y[n];
    r2 += a.v1.y[n] * b.w.x[n] + a.v2.y[n] * b.w.y[n];
    r1 += a.w.z[n] * b.w.x[n];
    r2 += a.w.z[n] * b.w.y[n];
    r1 -= a.v1.z[n] * b.v1.x[n] + a.v2.z[n] * b.v1.y[n];
    r2 -= a.v1.z[n] * b.v2.x[n] + a.v2.z[n] * b.v2.y[n];
    r1 -= a.w.z[n] * b.v1.z[n];
    r2 -= a.w.z[n] * b.v2.z[n];
    r.x1[n] = r1;
    r.x2[n] = r2;
  }
  return r;
}

// u . grad q with u = (v, w)
ScalarField advect(const Kin& u, const Grad& q) {
  ScalarField r(q.f.shape());
  for (std::size_t n = 0; n < r.size(); ++n) r[n] = u.v1.f[n] * q.x[n] + u.v2.f[n] * q.y[n] + u.w.f[n] * q.z[n];
  return r;
}

ScalarField advect_h(const HVectorField& v, const Grad& q) {
  ScalarField r(q.f.shape());
  for (std::size_t n = 0; n < r.size(); ++n) r[n] = v.x1[n] * q.x[n] + v.x2[n] * q.y[n];
  return r;
}

BoundaryField advect_trace(const ChannelOps& ops, const HVectorField& v, int k, const BoundaryField& hb) {
  const BoundaryVector gh = ops.grad_h(hb);
  const BoundaryField v1 = ops.trace(v.x1, k), v2 = ops.trace(v.x2, k);
  BoundaryField r(hb.shape());
  for (std::size_t n = 0; n < r.size(); ++n) r[n] = -(v1[n] * gh.x1[n] + v2[n] * gh.x2[n]);
  return ops.dealias(r);
}

// D mean_h(w v)
VProfile n3_profile(const ChannelOps& ops, const ScalarField& w, const HVectorField& v) {
  return ops.ddz(ops.horizontal_mean(HVectorField{hadamard(w, v.x1), hadamard(w, v.x2)}));
}

// N + i N^perp for a complex vector.
template <class F>
Vec2<F> polarize(const Vec2<F>& n) {
  const cplx I(0.0, 1.0);
  Vec2<F> r{n.x1, n.x2};
  r.x1.add_scaled(-I, n.x2);
  r.x2.add_scaled(I, n.x1);
  return r;
}

void check_finite(const ScalarField& f, const char* what) {
  if (!f.all_finite()) throw NumericalInstability(std::string(what) + ": non-finite values");
}

}  // namespace

ScalarField nonlinear_N1(const ChannelOps& ops, const PrimitiveState& p) {
  const Kin u = kinematics(ops, p);
  return ops.dealias(bilinear1(u, u));
}

HVectorField nonlinear_N2(const ChannelOps& ops, const PrimitiveState& p) {
  const Kin u = kinematics(ops, p);
  return ops.dealias(bilinear2(u, u));
}

VProfile nonlinear_N3(const ChannelOps& ops, const PrimitiveState& p) { return n3_profile(ops, p.w, p.v); }

GPVTendency gpv_tendency(const ChannelOps& ops, const GPVState& g, const TendencyOptions& opt) {
  const ChannelGrid& grid = ops.grid();
  if (!opt.nonlinear)
    return {ScalarField::zeros(grid), HVectorField::zeros(grid), BoundaryField::zeros(grid), BoundaryField::zeros(grid),
            VProfile::zeros(grid)};
  const PrimitiveState p = reconstruct_unchecked(ops, g);
  const Kin u = kinematics(ops, p);

  GPVTendency t;
  ScalarField dphi = advect(u, grad3(ops, g.Phi));
  dphi += bilinear1(u, u);
  dphi *= -1.0;
  t.dPhi = ops.dealias(dphi);

  HVectorField dpsi{advect(u, grad3(ops, g.Psi.x1)), advect(u, grad3(ops, g.Psi.x2))};
  dpsi += bilinear2(u, u);
  dpsi *= -1.0;
  t.dPsi_soft = ops.dealias(dpsi);

  t.dH0 = advect_trace(ops, p.v, 0, g.H0);
  t.dHh = advect_trace(ops, p.v, grid.nz(), g.Hh);
  t.dZ_soft = n3_profile(ops, p.w, p.v);
  t.dZ_soft *= -1.0;
  check_finite(t.dPhi, "gpv_tendency");
  return t;
}

PrimitiveTendency primitive_tendency(const ChannelOps& ops, const PrimitiveState& p, const TendencyOptions& opt) {
  const ChannelGrid& grid = ops.grid();
  const double eps = p.eps;
  if (!(eps > 0.0)) throw ConfigError("primitive_tendency: eps must be positive");
  const int nx = grid.nx(), nyh = grid.nyh(), nzp = grid.nzp(), nz = grid.nz();

  const Spectrum v1 = ops.forward(p.v.x1), v2 = ops.forward(p.v.x2);
  const Spectrum w = ops.forward(p.w), th = ops.forward(p.theta);
  Spectrum a1 = Spectrum::zeros(grid), a2 = a1, aw = a1, at = a1;
  if (opt.nonlinear) {
    const Kin u = kinematics(ops, p);
    ScalarField f1 = advect(u, u.v1), f2 = advect(u, u.v2), fw = advect(u, u.w), ft = advect(u, u.th);
    a1 = ops.forward(f1 *= -1.0);
    a2 = ops.forward(f2 *= -1.0);
    aw = ops.forward(fw *= -1.0);
    at = ops.forward(ft *= -1.0);
    ops.truncate(a1);
    ops.truncate(a2);
    ops.truncate(aw);
    ops.truncate(at);
  }

  // Delta p = eps div A + curl v + dz theta, dz p = theta + eps A_w on the walls.
  Spectrum rhs = ops.sdx(a1);
  rhs += ops.sdy(a2);
  rhs += ops.sdz(aw);
  rhs *= cplx(eps);
  rhs += ops.sdx(v2);
  rhs -= ops.sdy(v1);
  rhs += ops.sdz(th);
  SurfaceSpectrum bot = SurfaceSpectrum::zeros(grid), top = bot;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < nyh; ++j) {
      bot(i, j, 0) = th(i, j, 0) + eps * aw(i, j, 0);
      top(i, j, 0) = th(i, j, nz) + eps * aw(i, j, nz);
    }
  cplx defect = 0.0;
  const Spectrum pr = ops.inv_laplace_neumann(rhs, bot, top, &defect);
  Spectrum dzp = ops.sdz(pr);
  // The mean column only needs dz p; set it so the mean w tendency vanishes identically.
  for (int k = 0; k < nzp; ++k) dzp(0, 0, k) = th(0, 0, k) + eps * aw(0, 0, k);

  const double ie = 1.0 / eps;
  Spectrum d1 = a1, d2 = a2, dw = aw, dt = at;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < nyh; ++j) {
      const cplx kx = ops.ikx(i), ky = ops.iky(j);
      const bool mean = (i == 0 && j == 0);
      for (int k = 0; k < nzp; ++k) {
        const cplx pk = mean ? cplx(0.0) : pr(i, j, k);
        d1(i, j, k) -= ie * (-v2(i, j, k) + kx * pk);
        d2(i, j, k) -= ie * (v1(i, j, k) + ky * pk);
        dw(i, j, k) -= ie * (dzp(i, j, k) - th(i, j, k));
        dt(i, j, k) -= ie * w(i, j, k);
      }
    }

  PrimitiveTendency t;
  t.dv = {ops.backward(d1), ops.backward(d2)};
  t.dw = ops.backward(dw);
  t.dtheta = ops.backward(dt);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < grid.ny(); ++j) t.dw(i, j, 0) = t.dw(i, j, nz) = 0.0;
  t.pressure_defect = std::abs(defect);
  check_finite(t.dtheta, "primitive_tendency");
  return t;
}

double clean_divergence(const ChannelOps& ops, PrimitiveState& p) {
  const ChannelGrid& grid = ops.grid();
  Spectrum v1 = ops.forward(p.v.x1), v2 = ops.forward(p.v.x2), w = ops.forward(p.w);
  Spectrum div = ops.sdx(v1);
  div += ops.sdy(v2);
  div += ops.sdz(w);
  const ScalarField divf = ops.backward(div);
  const double before = std::sqrt(std::max(0.0, inner(ops, divf, divf)));

  const SurfaceSpectrum zero = SurfaceSpectrum::zeros(grid);
  const Spectrum phi = ops.inv_laplace_neumann(div, zero, zero);
  const Spectrum dphi = ops.sdz(phi);
  for (int i = 0; i < grid.nx(); ++i)
    for (int j = 0; j < grid.nyh(); ++j) {
      const bool mean = (i == 0 && j == 0);
      for (int k = 0; k < grid.nzp(); ++k) {
        if (mean) {
          w(i, j, k) = 0.0;
          continue;
        }
        v1(i, j, k) -= ops.ikx(i) * phi(i, j, k);
        v2(i, j, k) -= ops.iky(j) * phi(i, j, k);
        w(i, j, k) -= dphi(i, j, k);
      }
    }
  p.v = {ops.backward(v1), ops.backward(v2)};
  p.w = ops.backward(w);
  for (int i = 0; i < grid.nx(); ++i)
    for (int j = 0; j < grid.ny(); ++j) p.w(i, j, 0) = p.w(i, j, grid.nz()) = 0.0;
  return before;
}

// Limit system ---------------------------------------------------------------

namespace {

struct LimitKin {
  SlowComponents slow;
  FastComponents fast;
  Kin s, fr, fi;
};

LimitKin limit_kinematics(const ChannelOps& ops, const LimitState& L) {
  LimitKin k{limit_reconstruct_slow(ops, L), limit_reconstruct_fast(ops, L), {}, {}, {}};
  const ScalarField zero = ScalarField::zeros(ops.grid());
  k.s = kinematics(ops, k.slow.v_p, zero, k.slow.theta_p);
  k.fr = kinematics(ops, real_part(k.fast.V_plus), real_part(k.fast.W_plus), real_part(k.fast.Theta_plus));
  k.fi = kinematics(ops, imag_part(k.fast.V_plus), imag_part(k.fast.W_plus), imag_part(k.fast.Theta_plus));
  return k;
}

ScalarField n_phi(const ChannelOps& ops, const LimitKin& k) {
  ScalarField r = bilinear1(k.fr, k.fr);
  r += bilinear1(k.fi, k.fi);
  r *= 2.0;
  return ops.dealias(r);
}

CHVectorField n_psi(const ChannelOps& ops, const LimitKin& k) {
  HVectorField re = bilinear2(k.s, k.fr);
  re += bilinear2(k.fr, k.s);
  HVectorField im = bilinear2(k.s, k.fi);
  im += bilinear2(k.fi, k.s);
  return make_complex(ops.dealias(re), ops.dealias(im));
}

CVProfile n_z(const ChannelOps& ops, const LimitKin& k) {
  const VProfile re = n3_profile(ops, real_part(k.fast.W_plus), k.slow.v_p);
  const VProfile im = n3_profile(ops, imag_part(k.fast.W_plus), k.slow.v_p);
  return make_complex(re, im);
}

}  // namespace

ScalarField limit_N_phi(const ChannelOps& ops, const LimitState& L) { return n_phi(ops, limit_kinematics(ops, L)); }
CHVectorField limit_N_psi(const ChannelOps& ops, const LimitState& L) { return n_psi(ops, limit_kinematics(ops, L)); }
CVProfile limit_N_z(const ChannelOps& ops, const LimitState& L) { return n_z(ops, limit_kinematics(ops, L)); }

LimitTendency limit_tendency(const ChannelOps& ops, const LimitState& L, const TendencyOptions& opt) {
  const ChannelGrid& grid = ops.grid();
  if (!opt.nonlinear)
    return {ScalarField::zeros(grid), BoundaryField::zeros(grid), BoundaryField::zeros(grid),
            CHVectorField::zeros(grid), CVProfile::zeros(grid)};
  const LimitKin k = limit_kinematics(ops, L);
  const HVectorField& vp = k.slow.v_p;

  LimitTendency t;
  ScalarField dphi = advect_h(vp, grad3(ops, L.Phi_p));
  dphi *= -1.0;
  t.dPhi_p = ops.dealias(dphi);
  t.dPhi_p -= n_phi(ops, k);
  t.dHp0 = advect_trace(ops, vp, 0, L.Hp0);
  t.dHph = advect_trace(ops, vp, grid.nz(), L.Hph);

  auto adv_c = [&](const CScalarField& q) {
    ScalarField re = advect_h(vp, grad3(ops, real_part(q)));
    ScalarField im = advect_h(vp, grad3(ops, imag_part(q)));
    return make_complex(ops.dealias(re), ops.dealias(im));
  };
  t.dpsi_p = CHVectorField{adv_c(L.psi_p.x1), adv_c(L.psi_p.x2)};
  t.dpsi_p += polarize(n_psi(ops, k));
  t.dpsi_p *= cplx(-1.0);
  t.dz_p = polarize(n_z(ops, k));
  t.dz_p *= cplx(-1.0);
  check_finite(t.dPhi_p, "limit_tendency");
  return t;
}

}  // namespace gqg
