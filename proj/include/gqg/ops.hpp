#pragma once

#include <fftw3.h>

#include <Eigen/Dense>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "gqg/field.hpp"
#include "gqg/grid.hpp"

namespace gqg {

// Coefficients of e^{2 pi i (k1 x + k2 y)} per height, r2c half plane in y:
// shape Nx x (Ny/2+1) x (Nz+1).
struct SpectralTag {
  static Shape shape(const ChannelGrid& g) { return {g.nx(), g.nyh(), g.nzp()}; }
};
struct SurfaceSpectralTag {
  static Shape shape(const ChannelGrid& g) { return {g.nx(), g.nyh(), 1}; }
};
using Spectrum = Nodal<cplx, SpectralTag>;
using SurfaceSpectrum = Nodal<cplx, SurfaceSpectralTag>;
using BoundaryVector = Vec2<BoundaryField>;

enum class DiffKind { ddx, ddy, ddz, grad_h, div_h, curl_h, perp, laplace_h, laplace3 };
using AnyField = std::variant<ScalarField, HVectorField>;

enum class BcKind { dirichlet, neumann };
struct BoundaryCondition {
  BcKind kind = BcKind::dirichlet;
  cplx a{}, b{};  // data at z = 0 and z = h
  static BoundaryCondition dirichlet(cplx a, cplx b) { return {BcKind::dirichlet, a, b}; }
  static BoundaryCondition neumann(cplx a, cplx b) { return {BcKind::neumann, a, b}; }
};

struct Helmholtz1DResult {
  std::vector<cplx> values;
  // Neumann k2 = 0 only: int rhs dz - (b - a), removed before solving.
  cplx defect{};
};

// Spectral calculus on one ChannelGrid. Construction builds the FFT plans and
// factorizes every per-mode vertical operator up front; afterwards every
// method is const and safe to call from several threads.
class ChannelOps {
 public:
  explicit ChannelOps(const ChannelGrid& grid);
  ~ChannelOps();
  ChannelOps(const ChannelOps&) = delete;
  ChannelOps& operator=(const ChannelOps&) = delete;

  const ChannelGrid& grid() const noexcept { return g_; }

  // Transforms. forward is normalized so that f = sum_k c_k e^{2 pi i k.x}.
  Spectrum forward(const ScalarField& f) const;
  ScalarField backward(const Spectrum& s) const;
  SurfaceSpectrum forward(const BoundaryField& f) const;
  BoundaryField backward(const SurfaceSpectrum& s) const;

  // Fourier multipliers 2 pi i k (zero at the Nyquist index) and 4 pi^2 |k|^2.
  cplx ikx(int i) const noexcept;
  cplx iky(int j) const noexcept;
  double ksq(int i, int j) const noexcept;

  // Spectral-space kernels used by the hot paths.
  template <class Tag>
  Nodal<cplx, Tag> sdx(const Nodal<cplx, Tag>& s) const;
  template <class Tag>
  Nodal<cplx, Tag> sdy(const Nodal<cplx, Tag>& s) const;
  Spectrum sdz(const Spectrum& s) const;
  void truncate(Spectrum& s) const;
  void truncate(SurfaceSpectrum& s) const;

  // Physical-space operators.
  ScalarField ddx(const ScalarField& f) const;
  ScalarField ddy(const ScalarField& f) const;
  ScalarField ddz(const ScalarField& f) const;
  HVectorField ddz(const HVectorField& f) const;
  RealColumn ddz(const RealColumn& f) const;
  ComplexColumn ddz(const ComplexColumn& f) const;
  VProfile ddz(const VProfile& f) const { return {ddz(f.x1), ddz(f.x2)}; }
  CVProfile ddz(const CVProfile& f) const { return {ddz(f.x1), ddz(f.x2)}; }
  HVectorField grad_h(const ScalarField& f) const;
  ScalarField div_h(const HVectorField& f) const;
  ScalarField curl_h(const HVectorField& f) const;
  ScalarField laplace_h(const ScalarField& f) const;
  ScalarField laplace3(const ScalarField& f) const;
  BoundaryField ddx(const BoundaryField& f) const;
  BoundaryField ddy(const BoundaryField& f) const;
  BoundaryVector grad_h(const BoundaryField& f) const;
  BoundaryField laplace_h(const BoundaryField& f) const;

  AnyField apply_diff(DiffKind kind, const AnyField& f) const;

  ScalarField inv_laplace_dirichlet(const ScalarField& g) const;
  Spectrum inv_laplace_dirichlet(const Spectrum& g) const;
  // Per-mode (D^2 - |k|^2) f = g with dz f = a at z = 0 and dz f = b at z = h.
  // The k = 0 column is solved with the zero-mean bordered system; its
  // solvability defect is written to *defect0 when requested.
  Spectrum inv_laplace_neumann(const Spectrum& g, const SurfaceSpectrum& a, const SurfaceSpectrum& b,
                               cplx* defect0 = nullptr) const;
  ScalarField inv_laplace_h(const ScalarField& g) const;
  BoundaryField inv_laplace_h(const BoundaryField& g) const;
  Spectrum inv_laplace_h(const Spectrum& g) const;

  // E_b(A, B): traces A at z = 0 and B at z = h.
  ScalarField extend_boundary(const BoundaryField& a, const BoundaryField& b) const;
  // Vertical profile of E_b per integer wavenumber magnitude; exposed for tests.
  double chi0(double z) const noexcept;

  Helmholtz1DResult helmholtz_solve_1d(double k2, std::span<const cplx> rhs, const BoundaryCondition& bc) const;

  RealColumn horizontal_mean(const ScalarField& f) const;
  VProfile horizontal_mean(const HVectorField& f) const;
  ScalarField broadcast(const RealColumn& c) const;
  HVectorField broadcast(const VProfile& c) const;

  ScalarField dealias(const ScalarField& f) const;
  HVectorField dealias(const HVectorField& f) const;
  BoundaryField dealias(const BoundaryField& f) const;

  // Traces on the horizontal node planes z = z_k.
  BoundaryField trace(const ScalarField& f, int k) const;
  BoundaryField bottom(const ScalarField& f) const { return trace(f, 0); }
  BoundaryField top(const ScalarField& f) const { return trace(f, g_.nz()); }

  // Complex-valued fields act componentwise on real and imaginary parts.
  CScalarField ddx(const CScalarField& f) const;
  CScalarField ddy(const CScalarField& f) const;
  CScalarField ddz(const CScalarField& f) const;
  CHVectorField ddz(const CHVectorField& f) const;
  CHVectorField grad_h(const CScalarField& f) const;
  CScalarField div_h(const CHVectorField& f) const;
  CScalarField curl_h(const CHVectorField& f) const;
  CScalarField inv_laplace_dirichlet(const CScalarField& g) const;
  CScalarField inv_laplace_h(const CScalarField& g) const;
  CVProfile horizontal_mean(const CHVectorField& f) const;
  CHVectorField broadcast(const CVProfile& c) const;
  CScalarField dealias(const CScalarField& f) const;
  CHVectorField dealias(const CHVectorField& f) const;

 private:
  struct Plans;
  int ksq_index(int i, int j) const noexcept;
  void dirichlet_column(int kidx, const cplx* in, cplx* out) const;

  ChannelGrid g_;
  std::unique_ptr<Plans> plans_;
  std::vector<double> kx_, ky_;  // 2 pi k, zero at Nyquist for odd derivatives
  std::vector<int> kidx_;        // per (i, j): index into dir_lu_ by k1^2 + k2^2
  std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> dir_lu_;
  std::vector<double> dir_k2_;
  std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> neu_lu_;  // same index, Neumann rows, k2 > 0
  Eigen::PartialPivLU<Eigen::MatrixXd> neu0_lu_;              // bordered k2 = 0 system
};

template <class Tag>
Nodal<cplx, Tag> ChannelOps::sdx(const Nodal<cplx, Tag>& s) const {
  Nodal<cplx, Tag> r(s.shape());
  const auto& sh = s.shape();
  for (int i = 0; i < sh.n0; ++i) {
    const cplx m = ikx(i);
    for (int j = 0; j < sh.n1; ++j)
      for (int k = 0; k < sh.n2; ++k) r(i, j, k) = m * s(i, j, k);
  }
  return r;
}

template <class Tag>
Nodal<cplx, Tag> ChannelOps::sdy(const Nodal<cplx, Tag>& s) const {
  Nodal<cplx, Tag> r(s.shape());
  const auto& sh = s.shape();
  for (int i = 0; i < sh.n0; ++i)
    for (int j = 0; j < sh.n1; ++j) {
      const cplx m = iky(j);
      for (int k = 0; k < sh.n2; ++k) r(i, j, k) = m * s(i, j, k);
    }
  return r;
}

}  // namespace gqg
