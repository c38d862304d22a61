#include <cmath>

#include "doctest.h"
#include "gqg/errors.hpp"
#include "gqg/ops.hpp"
#include "gqg/states.hpp"
#include "support/analytic.hpp"

using namespace gqg;
using namespace testing_support;

TEST_CASE("grid nodes include both walls exactly") {
  ChannelGrid g(8, 8, 12, 2.0);
  CHECK(g.z(0) == 0.0);
  CHECK(g.z(12) == 2.0);
  double sum = 0.0;
  for (double w : g.cc_weights()) sum += w;
  CHECK(sum == doctest::Approx(2.0).epsilon(1e-14));
  CHECK_THROWS_AS(ChannelGrid(7, 8, 4), ConfigError);
  CHECK_THROWS_AS(ChannelGrid(8, 8, 1), ConfigError);
  CHECK_THROWS_AS(ChannelGrid(8, 8, 4, -1.0), ConfigError);
}

TEST_CASE("vertical collocation derivative is exact on polynomials") {
  for (int nz : {4, 8, 16, 32}) {
    ChannelGrid g(4, 4, nz, 1.3);
    ChannelOps ops(g);
    const ScalarField f = sample(g, [](double, double, double z) { return z * z; });
    const ScalarField d = ops.ddz(f);
    const ScalarField ex = sample(g, [](double, double, double z) { return 2 * z; });
    CHECK(max_diff(d, ex) <= 1e-12);
  }
}

TEST_CASE("horizontal derivatives are Fourier multipliers") {
  ChannelGrid g(16, 16, 8);
  ChannelOps ops(g);
  const ScalarField f = sample(g, [](double x, double y, double) { return std::sin(2 * pi * x) * std::cos(2 * pi * y); });
  const ScalarField fx = sample(g, [](double x, double y, double) { return 2 * pi * std::cos(2 * pi * x) * std::cos(2 * pi * y); });
  CHECK(max_diff(ops.ddx(f), fx) <= 1e-12);
  const ScalarField c = ops.curl_h(ops.grad_h(f));
  CHECK(c.max_abs() <= 1e-12);
}

TEST_CASE("perp rotates a constant field") {
  ChannelGrid g(4, 4, 4);
  ChannelOps ops(g);
  HVectorField x{ScalarField::constant(g, 1.0), ScalarField::zeros(g)};
  const auto r = std::get<HVectorField>(ops.apply_diff(DiffKind::perp, x));
  CHECK(r.x1.max_abs() == 0.0);
  CHECK(max_diff(r.x2, ScalarField::constant(g, 1.0)) == 0.0);
}

TEST_CASE("apply_diff rejects operands of the wrong arity") {
  ChannelGrid g(4, 4, 4);
  ChannelOps ops(g);
  CHECK_THROWS_AS(ops.apply_diff(DiffKind::div_h, ScalarField::zeros(g)), DimensionError);
  CHECK_THROWS_AS(ops.apply_diff(DiffKind::grad_h, HVectorField::zeros(g)), DimensionError);
  ChannelGrid g2(8, 4, 4);
  try {
    ops.ddx(ScalarField::zeros(g2));
    FAIL("expected a dimension error");
  } catch (const DimensionError& e) {
    CHECK(e.operand() == "field");
  }
}

TEST_CASE("div/curl of perp identities hold for random fields") {
  ChannelGrid g(16, 16, 10);
  ChannelOps ops(g);
  FieldGen gen(7);
  for (int trial = 0; trial < 5; ++trial) {
    HVectorField x{gen.smooth(g, 5, 4), gen.smooth(g, 5, 4)};
    CHECK((ops.div_h(perp(x)) + ops.curl_h(x)).max_abs() <= 1e-12);
    CHECK((ops.curl_h(perp(x)) - ops.div_h(x)).max_abs() <= 1e-12);
    CHECK(ops.horizontal_mean(ops.curl_h(x)).max_abs() <= 1e-14);
    CHECK(ops.horizontal_mean(ops.grad_h(x.x1)).max_abs() <= 1e-14);
  }
}

TEST_CASE("Dirichlet inverse Laplacian on eigenfunctions") {
  const double h = 1.0;
  ChannelGrid g(16, 16, 24, h);
  ChannelOps ops(g);
  const ScalarField g1 = sample(g, [&](double, double, double z) { return std::sin(pi * z / h); });
  const ScalarField f1 = ops.inv_laplace_dirichlet(g1);
  CHECK(max_diff(f1, g1 * (-(h / pi) * (h / pi))) <= 1e-12);

  const ScalarField g2 = sample(g, [&](double x, double, double z) { return std::sin(2 * pi * x) * std::sin(pi * z / h); });
  const ScalarField f2 = ops.inv_laplace_dirichlet(g2);
  CHECK(max_diff(f2, g2 * (-1.0 / (4 * pi * pi + pi * pi / (h * h)))) <= 1e-12);
  CHECK(max_diff(ops.laplace3(f2), g2) <= 1e-9);
  CHECK(ops.inv_laplace_dirichlet(ScalarField::zeros(g)).max_abs() == 0.0);
}

TEST_CASE("Delta_D^{-1} Delta is the identity only for fields vanishing on the walls") {
  ChannelGrid g(16, 16, 24);
  ChannelOps ops(g);
  FieldGen gen(11);
  const ScalarField fd = gen.smooth(g, 4, 5, true);
  CHECK(max_diff(ops.inv_laplace_dirichlet(ops.laplace3(fd)), fd) <= 1e-9 * fd.max_abs());
  const ScalarField fn = sample(g, [](double x, double, double z) { return std::cos(2 * pi * x) * (1 + z); });
  CHECK(max_diff(ops.inv_laplace_dirichlet(ops.laplace3(fn)), fn) >= 1e-2);
}

TEST_CASE("horizontal inverse Laplacian") {
  ChannelGrid g(16, 16, 6);
  ChannelOps ops(g);
  const ScalarField s = sample(g, [](double x, double, double) { return std::sin(2 * pi * x); });
  CHECK(max_diff(ops.inv_laplace_h(s), s * (-1.0 / (4 * pi * pi))) <= 1e-14);
  CHECK(ops.inv_laplace_h(ScalarField::constant(g, 1.0)).max_abs() == 0.0);
  const ScalarField c = sample(g, [](double x, double y, double) { return std::cos(2 * pi * x) * std::cos(4 * pi * y); });
  CHECK(max_diff(ops.laplace_h(ops.inv_laplace_h(c)), c) <= 1e-12);
  CHECK(max_diff(ops.inv_laplace_h(c), c * (-1.0 / (20 * pi * pi))) <= 1e-14);
  FieldGen gen(3);
  const ScalarField a = gen.smooth(g, 4, 4) + ScalarField::constant(g, 2.5);
  const ScalarField back = ops.inv_laplace_h(ops.laplace_h(a));
  const ScalarField expect = a - ops.broadcast(ops.horizontal_mean(a));
  CHECK(max_diff(back, expect) <= 1e-12);
}

TEST_CASE("extension operator traces and linearity") {
  ChannelGrid g(16, 16, 16);
  ChannelOps ops(g);
  CHECK(ops.extend_boundary(BoundaryField::zeros(g), BoundaryField::zeros(g)).max_abs() == 0.0);
  const ScalarField one = ops.extend_boundary(BoundaryField::constant(g, 1.0), BoundaryField::constant(g, 1.0));
  CHECK(max_diff(one, ScalarField::constant(g, 1.0)) <= 1e-14);
  const BoundaryField a = sample2(g, [](double x, double) { return std::sin(2 * pi * x); });
  const ScalarField e = ops.extend_boundary(a, BoundaryField::zeros(g));
  CHECK(max_diff(ops.bottom(e), a) == 0.0);
  CHECK(ops.top(e).max_abs() == 0.0);
  CHECK(e.max_abs() <= a.max_abs() + 1e-14);
  CHECK(ops.chi0(0.0) == 1.0);
  CHECK(ops.chi0(g.h()) == 0.0);

  FieldGen gen(5);
  const BoundaryField a1 = gen.smooth2(g, 5, 3), a2 = gen.smooth2(g, 5, 3);
  const BoundaryField b1 = gen.smooth2(g, 5, 3), b2 = gen.smooth2(g, 5, 3);
  const ScalarField lhs = ops.extend_boundary(a1 + a2, b1 + b2);
  const ScalarField rhs = ops.extend_boundary(a1, b1) + ops.extend_boundary(a2, b2);
  CHECK(max_diff(lhs, rhs) <= 1e-13);
}

TEST_CASE("1D Helmholtz solves") {
  ChannelGrid g(4, 4, 20, 1.5);
  ChannelOps ops(g);
  const double h = g.h();
  std::vector<cplx> zero(g.nzp(), 0.0);
  auto r0 = ops.helmholtz_solve_1d(0.0, zero, BoundaryCondition::dirichlet(0.0, 0.0));
  for (auto c : r0.values) CHECK(std::abs(c) == 0.0);

  auto r1 = ops.helmholtz_solve_1d(1.0, zero, BoundaryCondition::dirichlet(1.0, std::exp(-h)));
  for (int k = 0; k < g.nzp(); ++k) CHECK(std::abs(r1.values[k] - std::exp(-g.z(k))) <= 1e-12);

  std::vector<cplx> ones(g.nzp(), 1.0);
  auto r2 = ops.helmholtz_solve_1d(0.0, ones, BoundaryCondition::neumann(0.0, h));
  CHECK(std::abs(r2.defect) <= 1e-13);
  for (int k = 0; k < g.nzp(); ++k) {
    const double z = g.z(k);
    CHECK(std::abs(r2.values[k] - (z * z / 2 - h * h / 6)) <= 1e-12);
  }
  // Inconsistent Neumann data: the defect is reported and the solve still succeeds.
  auto r3 = ops.helmholtz_solve_1d(0.0, ones, BoundaryCondition::neumann(0.0, 0.0));
  CHECK(std::abs(r3.defect - h) <= 1e-12);

  std::vector<cplx> short_rhs(3, 0.0);
  CHECK_THROWS_AS(ops.helmholtz_solve_1d(0.0, short_rhs, BoundaryCondition::dirichlet(0.0, 0.0)), DimensionError);
}

TEST_CASE("horizontal mean and dealiasing") {
  ChannelGrid g(24, 24, 8);
  ChannelOps ops(g);
  const ScalarField f = sample(g, [](double x, double, double z) { return std::sin(2 * pi * x) * (1 + z * z); });
  CHECK(ops.horizontal_mean(f).max_abs() <= 1e-14);
  const auto c3 = ops.horizontal_mean(ScalarField::constant(g, 3.0));
  for (std::size_t k = 0; k < c3.size(); ++k) CHECK(c3[k] == doctest::Approx(3.0).epsilon(1e-15));
  const ScalarField f2 = sample(g, [](double, double y, double z) { return 2 + std::cos(2 * pi * y) * z; });
  const auto c2 = ops.horizontal_mean(f2);
  for (std::size_t k = 0; k < c2.size(); ++k) CHECK(std::abs(c2[k] - 2.0) <= 1e-14);

  const ScalarField low = sample(g, [](double x, double y, double) { return std::cos(2 * pi * 6 * x + 2 * pi * 3 * y); });
  CHECK(max_diff(ops.dealias(low), low) <= 1e-13);
  const ScalarField high = sample(g, [](double x, double, double z) { return std::cos(2 * pi * 9 * x) * z; });
  CHECK(ops.dealias(high).max_abs() <= 1e-13);
  FieldGen gen(9);
  const ScalarField r = gen.smooth(g, 12, 6);
  const ScalarField d1 = ops.dealias(r);
  CHECK(max_diff(ops.dealias(d1), d1) <= 1e-14);
}
