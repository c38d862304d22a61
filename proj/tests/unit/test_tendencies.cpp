#include <doctest.h>

#include <array>
#include <cmath>
#include <functional>

#include "gqg/gpv.hpp"
#include "gqg/tendencies.hpp"
#include "support/analytic.hpp"

using namespace testing_support;

namespace {

constexpr double twopi = 2 * pi;

// Value and first partials of an analytic scalar at one point.
struct J {
  double f, x, y, z;
};

// A manufactured, not necessarily solenoidal, state with closed-form partials:
//   v1 = sin(2 pi x) cos(2 pi y) cos(pi z)
//   v2 = cos(2 pi x) sin(pi z) + 0.5 sin(2 pi y) z
//   w  = sin(2 pi y) sin(pi z) + 0.2 cos(2 pi x) z^2
//   th = cos(2 pi (x + y)) z^2 + 0.4 sin(2 pi y) cos(pi z)
struct Manufactured {
  static J v1(double x, double y, double z) {
    const double sx = std::sin(twopi * x), cx = std::cos(twopi * x), sy = std::sin(twopi * y),
                 cy = std::cos(twopi * y), cz = std::cos(pi * z), sz = std::sin(pi * z);
    return {sx * cy * cz, twopi * cx * cy * cz, -twopi * sx * sy * cz, -pi * sx * cy * sz};
  }
  static J v2(double x, double y, double z) {
    const double sx = std::sin(twopi * x), cx = std::cos(twopi * x), sy = std::sin(twopi * y),
                 cy = std::cos(twopi * y), cz = std::cos(pi * z), sz = std::sin(pi * z);
    return {cx * sz + 0.5 * sy * z, -twopi * sx * sz, pi * cy * z, pi * cx * cz + 0.5 * sy};
  }
  static J w(double x, double y, double z) {
    const double sx = std::sin(twopi * x), cx = std::cos(twopi * x), sy = std::sin(twopi * y),
                 cy = std::cos(twopi * y), cz = std::cos(pi * z), sz = std::sin(pi * z);
    return {sy * sz + 0.2 * cx * z * z, -0.2 * twopi * sx * z * z, twopi * cy * sz, pi * sy * cz + 0.4 * cx * z};
  }
  static J th(double x, double y, double z) {
    const double c = std::cos(twopi * (x + y)), s = std::sin(twopi * (x + y)), sy = std::sin(twopi * y),
                 cy = std::cos(twopi * y), cz = std::cos(pi * z), sz = std::sin(pi * z);
    return {c * z * z + 0.4 * sy * cz, -twopi * s * z * z, -twopi * s * z * z + 0.4 * twopi * cy * cz,
            2 * c * z - 0.4 * pi * sy * sz};
  }

  static PrimitiveState state(const ChannelGrid& g) {
    PrimitiveState p = PrimitiveState::zeros(g);
    p.v.x1 = sample(g, [](double x, double y, double z) { return v1(x, y, z).f; });
    p.v.x2 = sample(g, [](double x, double y, double z) { return v2(x, y, z).f; });
    p.w = sample(g, [](double x, double y, double z) { return w(x, y, z).f; });
    p.theta = sample(g, [](double x, double y, double z) { return th(x, y, z).f; });
    return p;
  }

  static double N1(double x, double y, double z) {
    const J a = v1(x, y, z), b = v2(x, y, z), c = w(x, y, z), t = th(x, y, z);
    const double curl = b.x - a.y, div = a.x + b.y;
    return curl * div + (a.z * -c.y + b.z * c.x) + (a.z * t.x + b.z * t.y) + c.z * t.z;
  }

  static std::array<double, 2> N2(double x, double y, double z) {
    const J a = v1(x, y, z), b = v2(x, y, z), c = w(x, y, z), t = th(x, y, z);
    // ((grad v)^T grad theta)_i = d_i v . grad theta
    const double g1 = a.x * t.x + b.x * t.y, g2 = a.y * t.x + b.y * t.y;
    double r1 = -g2, r2 = g1;
    r1 += t.z * -c.y;
    r2 += t.z * c.x;
    r1 += a.x * c.x + b.x * c.y;
    r2 += a.y * c.x + b.y * c.y;
    r1 += c.z * c.x;
    r2 += c.z * c.y;
    // dz v . grad v_i
    r1 -= a.z * a.x + b.z * a.y;
    r2 -= a.z * b.x + b.z * b.y;
    r1 -= c.z * a.z;
    r2 -= c.z * b.z;
    return {r1, r2};
  }
};

// Balanced data from P = sin(2 pi x) sin(pi z) + 0.5 cos(2 pi y) z^2:
// v = grad^perp P, theta = dz P, w = 0.
PrimitiveState balanced(const ChannelGrid& g) {
  PrimitiveState p = PrimitiveState::zeros(g);
  p.v.x1 = sample(g, [](double, double y, double z) { return pi * std::sin(twopi * y) * z * z; });
  p.v.x2 = sample(g, [](double x, double, double z) { return twopi * std::cos(twopi * x) * std::sin(pi * z); });
  p.theta = sample(g, [](double x, double y, double z) {
    return pi * std::sin(twopi * x) * std::cos(pi * z) + std::cos(twopi * y) * z;
  });
  return p;
}

// -v . grad Phi for the balanced state above, worked out by hand.
double balanced_dphi(double x, double y, double z) {
  return std::cos(twopi * x) * std::sin(twopi * y) * std::sin(pi * z) * (4 * pi * pi + 2 * std::pow(pi, 4) * z * z);
}

double rel(double err, double scale) { return err / std::max(scale, 1e-300); }

}  // namespace

TEST_CASE("nonlinearities vanish on the zero state") {
  ChannelGrid g(16, 16, 12);
  ChannelOps ops(g);
  const PrimitiveState z = PrimitiveState::zeros(g);
  CHECK(nonlinear_N1(ops, z).max_abs() == 0.0);
  CHECK(nonlinear_N2(ops, z).max_abs() == 0.0);
  CHECK(nonlinear_N3(ops, z).max_abs() == 0.0);
}

TEST_CASE("N1 and N2 match the pointwise closed forms") {
  ChannelGrid g(16, 16, 24);
  ChannelOps ops(g);
  const PrimitiveState p = Manufactured::state(g);
  const ScalarField n1 = nonlinear_N1(ops, p);
  const ScalarField o1 = sample(g, Manufactured::N1);
  CHECK(rel(max_diff(n1, o1), o1.max_abs()) < 1e-10);
  const HVectorField n2 = nonlinear_N2(ops, p);
  const ScalarField o21 = sample(g, [](double x, double y, double z) { return Manufactured::N2(x, y, z)[0]; });
  const ScalarField o22 = sample(g, [](double x, double y, double z) { return Manufactured::N2(x, y, z)[1]; });
  CHECK(rel(max_diff(n2.x1, o21), o21.max_abs()) < 1e-10);
  CHECK(rel(max_diff(n2.x2, o22), o22.max_abs()) < 1e-10);
}

TEST_CASE("N1 of a geostrophically balanced state") {
  // div v = 0, w = 0 and dz v . grad theta = grad^perp P_z . grad P_z = 0
  ChannelGrid g(16, 16, 20);
  ChannelOps ops(g);
  const PrimitiveState p = balanced(g);
  CHECK(nonlinear_N1(ops, p).max_abs() < 1e-11);
}

TEST_CASE("N2 of a pure linear stratification is zero") {
  ChannelGrid g(16, 16, 12);
  ChannelOps ops(g);
  PrimitiveState p = PrimitiveState::zeros(g);
  p.theta = sample(g, [](double, double, double z) { return z; });
  CHECK(nonlinear_N2(ops, p).max_abs() < 1e-13);
}

TEST_CASE("N3 examples") {
  for (double h : {1.0, 0.8}) {
    ChannelGrid g(16, 16, 24, h);
    ChannelOps ops(g);
    PrimitiveState p = PrimitiveState::zeros(g);
    p.v.x1 = sample(g, [&](double x, double, double z) { return std::sin(twopi * x) * std::cos(pi * z / h); });
    CHECK(nonlinear_N3(ops, p).max_abs() == 0.0);

    p.w = sample(g, [&](double x, double, double z) { return std::sin(twopi * x) * std::sin(pi * z / h); });
    const VProfile n3 = nonlinear_N3(ops, p);
    const RealColumn expect = sample_z(g, [&](double z) { return pi / (2 * h) * std::cos(2 * pi * z / h); });
    CHECK(max_diff(n3.x1, expect) < 1e-11);
    CHECK(n3.x2.max_abs() < 1e-15);

    // no common horizontal mode
    p.w = sample(g, [&](double, double y, double z) { return std::cos(twopi * 2 * y) * std::sin(pi * z / h); });
    CHECK(nonlinear_N3(ops, p).max_abs() < 1e-14);
  }
}

TEST_CASE("gpv_tendency examples") {
  ChannelGrid g(16, 16, 20);
  ChannelOps ops(g);
  const GPVTendency z = gpv_tendency(ops, GPVState::zeros(g));
  CHECK(z.dPhi.max_abs() == 0.0);
  CHECK(z.dPsi_soft.max_abs() == 0.0);
  CHECK(z.dH0.max_abs() == 0.0);
  CHECK(z.dZ_soft.max_abs() == 0.0);

  FieldGen gen(4);
  const GPVState s = extract_gpv(ops, gen.primitive(ops, 2, 3));
  const GPVTendency lin = gpv_tendency(ops, s, TendencyOptions{false});
  CHECK(lin.dPhi.max_abs() == 0.0);
  CHECK(lin.dPsi_soft.max_abs() == 0.0);
  CHECK(lin.dZ_soft.max_abs() == 0.0);
  CHECK(lin.dH0.max_abs() == 0.0);
  CHECK(lin.dHh.max_abs() == 0.0);

  const GPVTendency b = gpv_tendency(ops, extract_gpv(ops, balanced(g)));
  const ScalarField oracle = sample(g, balanced_dphi);
  CHECK(rel(max_diff(b.dPhi, oracle), oracle.max_abs()) < 1e-10);
  CHECK(b.dH0.max_abs() < 1e-11);
  const BoundaryField dhh = sample2(g, [](double x, double y) {
    return 2 * std::pow(pi, 3) * std::sin(twopi * y) * std::cos(twopi * x);
  });
  CHECK(rel(max_diff(b.dHh, dhh), dhh.max_abs()) < 1e-10);
}

TEST_CASE("gpv_tendency agrees with the chain rule through primitive_tendency") {
  ChannelGrid g(24, 24, 24);
  ChannelOps ops(g);
  FieldGen gen(31);
  for (int trial = 0; trial < 3; ++trial) {
    PrimitiveState p = gen.primitive(ops, 2, 3, 0.2);
    p.eps = 0.1;
    const GPVState s = extract_gpv(ops, p);
    const PrimitiveTendency pt = primitive_tendency(ops, p);
    const GPVTendency gt = gpv_tendency(ops, s);

    // d/dt of the GPV variables from the primitive rates
    PrimitiveState rate{pt.dv, pt.dw, pt.dtheta, 0.0, p.eps};
    const GPVState d = extract_gpv(ops, rate);
    HVectorField dpsi = gt.dPsi_soft;
    dpsi.add_scaled(-1.0 / p.eps, perp(s.Psi));
    VProfile dz = gt.dZ_soft;
    dz.add_scaled(-1.0 / p.eps, perp(s.Z));

    const double sp = d.Phi.max_abs(), ss = d.Psi.max_abs();
    MESSAGE("Phi " << max_diff(d.Phi, gt.dPhi) / sp << " Psi " << max_diff(d.Psi, dpsi) / ss);
    CHECK(max_diff(d.Phi, gt.dPhi) / sp < 1e-6);
    CHECK(max_diff(d.Psi, dpsi) / ss < 1e-6);
    CHECK(max_diff(d.H0, gt.dH0) / std::max(gt.dH0.max_abs(), 1e-12) < 1e-6);
    CHECK(max_diff(d.Hh, gt.dHh) / std::max(gt.dHh.max_abs(), 1e-12) < 1e-6);
    CHECK(max_diff(d.Z, dz) / std::max(dz.max_abs(), 1e-12) < 1e-6);
  }
}

TEST_CASE("primitive_tendency examples") {
  ChannelGrid g(16, 16, 16, 1.5);
  ChannelOps ops(g);
  const PrimitiveTendency z = primitive_tendency(ops, PrimitiveState::zeros(g, 0.1));
  CHECK(z.dv.max_abs() == 0.0);
  CHECK(z.dw.max_abs() == 0.0);
  CHECK(z.dtheta.max_abs() == 0.0);

  // hydrostatic rest state is a fixed point
  PrimitiveState rest = PrimitiveState::zeros(g, 0.1);
  rest.theta = sample(g, [&](double, double, double zz) { return zz - g.h() / 2; });
  const PrimitiveTendency r = primitive_tendency(ops, rest);
  CHECK(r.dv.max_abs() < 1e-11);
  CHECK(r.dw.max_abs() < 1e-11);
  CHECK(r.dtheta.max_abs() < 1e-11);
}

TEST_CASE("primitive_tendency conserves the L2 energy") {
  // cubic integrands need the vertical margin to be summed exactly by parts
  ChannelGrid g(16, 16, 32);
  ChannelOps ops(g);
  FieldGen gen(12);
  for (int trial = 0; trial < 10; ++trial) {
    PrimitiveState p = gen.primitive(ops, gen.integer(1, 3), gen.integer(1, 4), gen.uniform(0.05, 1.0));
    p.eps = gen.uniform(0.02, 1.0);
    const PrimitiveTendency t = primitive_tendency(ops, p);
    const double de = inner(ops, t.dv.x1, p.v.x1) + inner(ops, t.dv.x2, p.v.x2) + inner(ops, t.dw, p.w) +
                      inner(ops, t.dtheta, p.theta);
    const double scale = std::sqrt(l2_energy(ops, p) * l2_energy(ops, PrimitiveState{t.dv, t.dw, t.dtheta, 0, 1}));
    CHECK(std::abs(de) / scale < 1e-9);
    // impermeability is preserved
    CHECK(ops.bottom(t.dw).max_abs() == 0.0);
    CHECK(ops.top(t.dw).max_abs() == 0.0);
  }
}

TEST_CASE("limit nonlinearities vanish for well-prepared or slow-free data") {
  ChannelGrid g(16, 16, 16);
  ChannelOps ops(g);
  const GPVState s = extract_gpv(ops, balanced(g));
  const LimitState L = project_to_limit(s);
  CHECK(L.psi_p.max_abs() < 1e-10);
  LimitState wp = L;
  wp.psi_p = CHVectorField::zeros(g);
  wp.z_p = CVProfile::zeros(g);
  CHECK(limit_N_phi(ops, wp).max_abs() == 0.0);
  CHECK(limit_N_psi(ops, wp).max_abs() == 0.0);
  CHECK(limit_N_z(ops, wp).max_abs() == 0.0);
  const LimitTendency t = limit_tendency(ops, wp);
  CHECK(t.dpsi_p.max_abs() == 0.0);
  CHECK(t.dz_p.max_abs() == 0.0);
  // the remaining dynamics is classical PV transport
  const ScalarField oracle = sample(g, balanced_dphi);
  CHECK(rel(max_diff(t.dPhi_p, oracle), oracle.max_abs()) < 1e-10);

  // slow part zero: N_psi and N_z vanish because every term is slow x fast
  FieldGen gen(6);
  LimitState f = project_to_limit(extract_gpv(ops, gen.primitive(ops, 2, 3)));
  f.Phi_p = ScalarField::zeros(g);
  f.Hp0 = BoundaryField::zeros(g);
  f.Hph = BoundaryField::zeros(g);
  CHECK(limit_N_psi(ops, f).max_abs() == 0.0);
  CHECK(limit_N_z(ops, f).max_abs() == 0.0);
  CHECK(limit_tendency(ops, LimitState::zeros(g)).dPhi_p.max_abs() == 0.0);
}

TEST_CASE("N_phi is the phase average of N1 over the fast field") {
  ChannelGrid g(16, 16, 16);
  ChannelOps ops(g);
  FieldGen gen(21);
  // generic complex envelopes: independent real and imaginary parts
  const GPVState a = extract_gpv(ops, gen.primitive(ops, 2, 3)), b = extract_gpv(ops, gen.primitive(ops, 2, 3));
  LimitState L = LimitState::zeros(g);
  L.psi_p = make_complex(a.Psi, b.Psi);
  L.z_p = make_complex(a.Z, b.Z);
  // N1(e^{i tau} F + c.c.) = e^{2 i tau} B(F,F) + c.c. + B(F,conj F) + B(conj F,F);
  // tau = 0 and pi/2 cancel the oscillating part.
  const ScalarField n0 = nonlinear_N1(ops, compose_approximation(ops, L, 0.0, 1.0));
  const ScalarField n1 = nonlinear_N1(ops, compose_approximation(ops, L, pi / 2, 1.0));
  ScalarField avg = n0 + n1;
  avg *= 0.5;
  const ScalarField nphi = limit_N_phi(ops, L);
  REQUIRE(avg.max_abs() > 1e-3 * n0.max_abs());
  CHECK(rel(max_diff(nphi, avg), avg.max_abs()) < 1e-11);

  // conjugating the envelopes leaves N_phi unchanged
  LimitState c = L;
  c.psi_p = conj(L.psi_p);
  c.z_p = conj(L.z_p);
  CHECK(rel(max_diff(limit_N_phi(ops, c), nphi), nphi.max_abs()) < 1e-12);
}

TEST_CASE("N_phi vanishes on circularly polarized envelopes") {
  // Envelopes of the form X + i X^perp (everything fast_filter produces, and
  // invariant under the limit dynamics) carry no mean forcing of the PV.
  ChannelGrid g(16, 16, 16);
  ChannelOps ops(g);
  FieldGen gen(29);
  for (int trial = 0; trial < 3; ++trial) {
    LimitState L = project_to_limit(extract_gpv(ops, gen.primitive(ops, 2, 3)));
    L.psi_p *= std::exp(cplx(0, gen.uniform(0, 2 * pi)));
    const ScalarField n1 = nonlinear_N1(ops, compose_approximation(ops, L, 0.0, 1.0));
    CHECK(limit_N_phi(ops, L).max_abs() < 1e-12 * n1.max_abs());
  }
}

TEST_CASE("N_psi is the slow-fast polarization of N2") {
  ChannelGrid g(16, 16, 16);
  ChannelOps ops(g);
  FieldGen gen(22);
  const GPVState s = extract_gpv(ops, gen.primitive(ops, 2, 3));
  LimitState L = project_to_limit(s);
  // rotate the envelopes off the real axis so both parts are exercised
  L.psi_p *= std::exp(cplx(0, 0.7));
  L.z_p *= std::exp(cplx(0, 0.7));
  const SlowComponents sl = limit_reconstruct_slow(ops, L);
  const FastComponents fc = limit_reconstruct_fast(ops, L);
  auto sym = [&](const HVectorField& V, const ScalarField& W, const ScalarField& T) {
    // B(S,F) + B(F,S) = (N2(S+F) - N2(S-F)) / 2 with w_p = 0
    PrimitiveState plus{sl.v_p + V, W, sl.theta_p + T, 0, 1}, minus{sl.v_p - V, -W, sl.theta_p - T, 0, 1};
    HVectorField r = nonlinear_N2(ops, plus) - nonlinear_N2(ops, minus);
    r *= 0.5;
    return r;
  };
  const HVectorField re = sym(real_part(fc.V_plus), real_part(fc.W_plus), real_part(fc.Theta_plus));
  const HVectorField im = sym(imag_part(fc.V_plus), imag_part(fc.W_plus), imag_part(fc.Theta_plus));
  const CHVectorField npsi = limit_N_psi(ops, L);
  const double scale = std::max(re.max_abs(), im.max_abs());
  CHECK(max_diff(real_part(npsi), re) / scale < 1e-11);
  CHECK(max_diff(imag_part(npsi), im) / scale < 1e-11);
}

TEST_CASE("N_z closed form for matched single modes") {
  ChannelGrid g(16, 16, 24);
  ChannelOps ops(g);
  LimitState L = LimitState::zeros(g);
  // v_p = (0, -2/(5 pi) cos(2 pi x) cos(pi z)), W_+ = -i/(5 pi) e^{2 pi i x} sin(pi z)
  L.Phi_p = sample(g, [](double x, double, double z) { return std::sin(twopi * x) * std::cos(pi * z); });
  L.psi_p.x1 = CScalarField::zeros(g);
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j)
      for (int k = 0; k < g.nzp(); ++k) L.psi_p.x1(i, j, k) = std::exp(cplx(0, twopi * g.x(i))) * std::sin(pi * g.z(k));
  L.psi_p.x2 = CScalarField::zeros(g);
  const CVProfile nz = limit_N_z(ops, L);
  CHECK(nz.x1.max_abs() < 1e-13);
  for (int k = 0; k < g.nzp(); ++k)
    CHECK(std::abs(nz.x2[k] - cplx(0, std::cos(twopi * g.z(k)) / (25 * pi))) < 1e-11);

  // disjoint horizontal modes
  L.Phi_p = sample(g, [](double, double y, double z) { return std::sin(2 * twopi * y) * std::cos(pi * z); });
  CHECK(limit_N_z(ops, L).max_abs() < 1e-14);
}

TEST_CASE("limit_tendency assembles the fast-envelope equations") {
  ChannelGrid g(16, 16, 16);
  ChannelOps ops(g);
  FieldGen gen(23);
  const LimitState L = project_to_limit(extract_gpv(ops, gen.primitive(ops, 2, 3)));
  const LimitTendency t = limit_tendency(ops, L);
  const SlowComponents sl = limit_reconstruct_slow(ops, L);
  const CHVectorField npsi = limit_N_psi(ops, L);
  const CVProfile nz = limit_N_z(ops, L);

  auto transport = [&](const ScalarField& q) {
    const HVectorField gq = ops.grad_h(q);
    return ops.dealias(-(hadamard(sl.v_p.x1, gq.x1) + hadamard(sl.v_p.x2, gq.x2)));
  };
  // dpsi = -v_p . grad psi - (N + i N^perp), N^perp = (-N2, N1)
  const cplx I(0, 1);
  for (int c = 0; c < 2; ++c) {
    const CScalarField& q = c == 0 ? L.psi_p.x1 : L.psi_p.x2;
    const CScalarField adv = make_complex(transport(real_part(q)), transport(imag_part(q)));
    const CScalarField& nn = c == 0 ? npsi.x1 : npsi.x2;
    const CScalarField np = c == 0 ? -npsi.x2 : npsi.x1;
    CScalarField expect = adv - nn;
    expect.add_scaled(-I, np);
    const CScalarField& got = c == 0 ? t.dpsi_p.x1 : t.dpsi_p.x2;
    CHECK(max_diff(got, expect) / expect.max_abs() < 1e-12);
  }
  for (int k = 0; k < g.nzp(); ++k) {
    CHECK(std::abs(t.dz_p.x1[k] - (-nz.x1[k] + I * nz.x2[k])) < 1e-13);
    CHECK(std::abs(t.dz_p.x2[k] - (-nz.x2[k] - I * nz.x1[k])) < 1e-13);
  }
  const ScalarField nphi = limit_N_phi(ops, L);
  const ScalarField expect = transport(L.Phi_p) - nphi;
  CHECK(max_diff(t.dPhi_p, ops.dealias(expect)) / expect.max_abs() < 1e-12);
}

TEST_CASE("clean_divergence projects onto solenoidal fields") {
  ChannelGrid g(16, 16, 16);
  ChannelOps ops(g);
  FieldGen gen(3);
  PrimitiveState p = gen.primitive(ops, 2, 3);
  const PrimitiveState ref = p;
  PrimitiveState q = p;
  q.v.x1 += ops.ddx(gen.smooth(g, 2, 2));
  const double before = clean_divergence(ops, q);
  CHECK(before > 1e-2);
  // interior collocation divergence is removed, impermeability kept
  const ScalarField div = ops.div_h(q.v) + ops.ddz(q.w);
  double interior = 0.0;
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j)
      for (int k = 1; k < g.nz(); ++k) interior = std::max(interior, std::abs(div(i, j, k)));
  CHECK(interior < 1e-9);
  CHECK(ops.bottom(q.w).max_abs() == 0.0);
  // already solenoidal input is left alone
  CHECK(clean_divergence(ops, p) < 1e-12);
  CHECK(max_diff(p.v, ref.v) < 1e-12);
}
