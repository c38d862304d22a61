#include "gqg/ops.hpp"

#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>

#include "gqg/errors.hpp"

namespace gqg {

namespace {

// FFTW's planner is not reentrant; execution with the new-array interface is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

using StridedConst = Eigen::Map<const Eigen::MatrixXd, 0, Eigen::Stride<Eigen::Dynamic, 2>>;
using Strided = Eigen::Map<Eigen::MatrixXd, 0, Eigen::Stride<Eigen::Dynamic, 2>>;

double smooth_step(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / s);
  const double b = std::exp(-1.0 / (1.0 - s));
  return a / (a + b);
}

}  // namespace

struct ChannelOps::Plans {
  fftw_plan vol_r2c = nullptr, vol_c2r = nullptr;
  fftw_plan srf_r2c = nullptr, srf_c2r = nullptr;
};

ChannelOps::ChannelOps(const ChannelGrid& grid) : g_(grid), plans_(std::make_unique<Plans>()) {
  const int nx = g_.nx(), ny = g_.ny(), nyh = g_.nyh(), nzp = g_.nzp(), nz = g_.nz();
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    const std::size_t nreal = static_cast<std::size_t>(nx) * ny * nzp;
    const std::size_t ncplx = static_cast<std::size_t>(nx) * nyh * nzp;
    double* rbuf = fftw_alloc_real(nreal);
    fftw_complex* cbuf = fftw_alloc_complex(ncplx);
    int n[2] = {nx, ny};
    int rembed[2] = {nx, ny};
    int cembed[2] = {nx, nyh};
    plans_->vol_r2c = fftw_plan_many_dft_r2c(2, n, nzp, rbuf, rembed, nzp, 1, cbuf, cembed, nzp, 1, flags);
    plans_->vol_c2r = fftw_plan_many_dft_c2r(2, n, nzp, cbuf, cembed, nzp, 1, rbuf, rembed, nzp, 1, flags);
    plans_->srf_r2c = fftw_plan_dft_r2c_2d(nx, ny, rbuf, cbuf, flags);
    plans_->srf_c2r = fftw_plan_dft_c2r_2d(nx, ny, cbuf, rbuf, flags);
    fftw_free(rbuf);
    fftw_free(cbuf);
    if (!plans_->vol_r2c || !plans_->vol_c2r || !plans_->srf_r2c || !plans_->srf_c2r)
      throw ConfigError("FFTW could not create plans for this grid");
  }

  using std::numbers::pi;
  kx_.resize(nx);
  ky_.resize(nyh);
  for (int i = 0; i < nx; ++i) kx_[i] = (2 * i == nx) ? 0.0 : 2.0 * pi * g_.kx(i);
  for (int j = 0; j < nyh; ++j) ky_[j] = (2 * j == ny) ? 0.0 : 2.0 * pi * j;

  // One factorization per distinct integer |k|^2.
  std::vector<int> slot((nx / 2) * (nx / 2) + (ny / 2) * (ny / 2) + 1, -1);
  kidx_.assign(static_cast<std::size_t>(nx) * nyh, 0);
  const Eigen::MatrixXd& d1 = g_.dz();
  const Eigen::MatrixXd& d2 = g_.dzz();
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < nyh; ++j) {
      const int k1 = g_.kx(i);
      const int m = k1 * k1 + j * j;
      if (slot[m] < 0) {
        slot[m] = static_cast<int>(dir_lu_.size());
        const double k2 = 4.0 * pi * pi * m;
        Eigen::MatrixXd a = d2 - k2 * Eigen::MatrixXd::Identity(nzp, nzp);
        a.row(0).setZero();
        a(0, 0) = 1.0;
        a.row(nz).setZero();
        a(nz, nz) = 1.0;
        dir_lu_.emplace_back(a);
        dir_k2_.push_back(k2);
        if (dir_lu_.back().rcond() < 1e-14)
          throw NumericalInstability("ill-conditioned Dirichlet operator at |k|^2 = " + std::to_string(m));
        Eigen::MatrixXd b = d2 - k2 * Eigen::MatrixXd::Identity(nzp, nzp);
        b.row(0) = d1.row(0);
        b.row(nz) = d1.row(nz);
        neu_lu_.emplace_back(b);
      }
      kidx_[static_cast<std::size_t>(i) * nyh + j] = slot[m];
    }

  // Bordered Neumann system for k = 0: [M e; w^T 0] with e the interior indicator.
  Eigen::MatrixXd bord = Eigen::MatrixXd::Zero(nzp + 1, nzp + 1);
  bord.topLeftCorner(nzp, nzp) = d2;
  bord.block(0, 0, 1, nzp) = d1.row(0);
  bord.block(nz, 0, 1, nzp) = d1.row(nz);
  for (int k = 1; k < nz; ++k) bord(k, nzp) = 1.0;
  const auto w = g_.cc_weights();
  for (int k = 0; k < nzp; ++k) bord(nzp, k) = w[k];
  neu0_lu_.compute(bord);
}

ChannelOps::~ChannelOps() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (plans_) {
    for (fftw_plan p : {plans_->vol_r2c, plans_->vol_c2r, plans_->srf_r2c, plans_->srf_c2r})
      if (p) fftw_destroy_plan(p);
  }
}

// Transforms -----------------------------------------------------------------

Spectrum ChannelOps::forward(const ScalarField& f) const {
  f.require_grid(g_, "field");
  Spectrum s = Spectrum::zeros(g_);
  fftw_execute_dft_r2c(plans_->vol_r2c, const_cast<double*>(f.data()), reinterpret_cast<fftw_complex*>(s.data()));
  s *= cplx(1.0 / (static_cast<double>(g_.nx()) * g_.ny()));
  return s;
}

ScalarField ChannelOps::backward(const Spectrum& s) const {
  s.require_grid(g_, "spectrum");
  std::vector<cplx> scratch(s.values().begin(), s.values().end());
  ScalarField f = ScalarField::zeros(g_);
  fftw_execute_dft_c2r(plans_->vol_c2r, reinterpret_cast<fftw_complex*>(scratch.data()), f.data());
  return f;
}

SurfaceSpectrum ChannelOps::forward(const BoundaryField& f) const {
  f.require_grid(g_, "boundary field");
  SurfaceSpectrum s = SurfaceSpectrum::zeros(g_);
  fftw_execute_dft_r2c(plans_->srf_r2c, const_cast<double*>(f.data()), reinterpret_cast<fftw_complex*>(s.data()));
  s *= cplx(1.0 / (static_cast<double>(g_.nx()) * g_.ny()));
  return s;
}

BoundaryField ChannelOps::backward(const SurfaceSpectrum& s) const {
  s.require_grid(g_, "boundary spectrum");
  std::vector<cplx> scratch(s.values().begin(), s.values().end());
  BoundaryField f = BoundaryField::zeros(g_);
  fftw_execute_dft_c2r(plans_->srf_c2r, reinterpret_cast<fftw_complex*>(scratch.data()), f.data());
  return f;
}

cplx ChannelOps::ikx(int i) const noexcept { return {0.0, kx_[i]}; }
cplx ChannelOps::iky(int j) const noexcept { return {0.0, ky_[j]}; }
double ChannelOps::ksq(int i, int j) const noexcept {
  return dir_k2_[kidx_[static_cast<std::size_t>(i) * g_.nyh() + j]];
}
int ChannelOps::ksq_index(int i, int j) const noexcept { return kidx_[static_cast<std::size_t>(i) * g_.nyh() + j]; }

Spectrum ChannelOps::sdz(const Spectrum& s) const {
  s.require_grid(g_, "spectrum");
  Spectrum r(s.shape());
  const int nzp = g_.nzp();
  const Eigen::Index ncol = static_cast<Eigen::Index>(g_.nx()) * g_.nyh();
  const Eigen::Stride<Eigen::Dynamic, 2> st(2 * nzp, 2);
  const double* in = reinterpret_cast<const double*>(s.data());
  double* out = reinterpret_cast<double*>(r.data());
  for (int part = 0; part < 2; ++part) {
    StridedConst a(in + part, nzp, ncol, st);
    Strided b(out + part, nzp, ncol, st);
    b.noalias() = g_.dz() * a;
  }
  return r;
}

void ChannelOps::truncate(Spectrum& s) const {
  if (!g_.dealias()) return;
  for (int i = 0; i < g_.nx(); ++i)
    for (int j = 0; j < g_.nyh(); ++j)
      if (!g_.retained(g_.kx(i), j))
        for (int k = 0; k < g_.nzp(); ++k) s(i, j, k) = 0.0;
}

void ChannelOps::truncate(SurfaceSpectrum& s) const {
  if (!g_.dealias()) return;
  for (int i = 0; i < g_.nx(); ++i)
    for (int j = 0; j < g_.nyh(); ++j)
      if (!g_.retained(g_.kx(i), j)) s(i, j, 0) = 0.0;
}

// Physical-space operators --------------------------------------------------

ScalarField ChannelOps::ddx(const ScalarField& f) const { return backward(sdx(forward(f))); }
ScalarField ChannelOps::ddy(const ScalarField& f) const { return backward(sdy(forward(f))); }

ScalarField ChannelOps::ddz(const ScalarField& f) const {
  f.require_grid(g_, "field");
  ScalarField r(f.shape());
  const Eigen::Index ncol = static_cast<Eigen::Index>(g_.nx()) * g_.ny();
  Eigen::Map<const Eigen::MatrixXd> a(f.data(), g_.nzp(), ncol);
  Eigen::Map<Eigen::MatrixXd> b(r.data(), g_.nzp(), ncol);
  b.noalias() = g_.dz() * a;
  return r;
}

HVectorField ChannelOps::ddz(const HVectorField& f) const { return {ddz(f.x1), ddz(f.x2)}; }

RealColumn ChannelOps::ddz(const RealColumn& f) const {
  f.require_grid(g_, "profile");
  RealColumn r(f.shape());
  Eigen::Map<const Eigen::VectorXd> a(f.data(), g_.nzp());
  Eigen::Map<Eigen::VectorXd> b(r.data(), g_.nzp());
  b.noalias() = g_.dz() * a;
  return r;
}

ComplexColumn ChannelOps::ddz(const ComplexColumn& f) const {
  return make_complex(ddz(real_part(f)), ddz(imag_part(f)));
}

HVectorField ChannelOps::grad_h(const ScalarField& f) const {
  const Spectrum s = forward(f);
  return {backward(sdx(s)), backward(sdy(s))};
}

ScalarField ChannelOps::div_h(const HVectorField& f) const {
  Spectrum s = sdx(forward(f.x1));
  s += sdy(forward(f.x2));
  return backward(s);
}

ScalarField ChannelOps::curl_h(const HVectorField& f) const {
  Spectrum s = sdx(forward(f.x2));
  s -= sdy(forward(f.x1));
  return backward(s);
}

ScalarField ChannelOps::laplace_h(const ScalarField& f) const {
  Spectrum s = forward(f);
  for (int i = 0; i < g_.nx(); ++i)
    for (int j = 0; j < g_.nyh(); ++j) {
      const double m = -ksq(i, j);
      for (int k = 0; k < g_.nzp(); ++k) s(i, j, k) *= m;
    }
  return backward(s);
}

ScalarField ChannelOps::laplace3(const ScalarField& f) const {
  ScalarField r = laplace_h(f);
  r += ddz(ddz(f));
  return r;
}

BoundaryField ChannelOps::ddx(const BoundaryField& f) const { return backward(sdx(forward(f))); }
BoundaryField ChannelOps::ddy(const BoundaryField& f) const { return backward(sdy(forward(f))); }

BoundaryVector ChannelOps::grad_h(const BoundaryField& f) const {
  const SurfaceSpectrum s = forward(f);
  return {backward(sdx(s)), backward(sdy(s))};
}

BoundaryField ChannelOps::laplace_h(const BoundaryField& f) const {
  SurfaceSpectrum s = forward(f);
  for (int i = 0; i < g_.nx(); ++i)
    for (int j = 0; j < g_.nyh(); ++j) s(i, j, 0) *= -ksq(i, j);
  return backward(s);
}

AnyField ChannelOps::apply_diff(DiffKind kind, const AnyField& f) const {
  const ScalarField* s = std::get_if<ScalarField>(&f);
  const HVectorField* v = std::get_if<HVectorField>(&f);
  auto need_scalar = [&](const char* op) {
    if (!s) throw DimensionError("f", std::string(op) + " needs a scalar field, got a horizontal vector field");
  };
  auto need_vector = [&](const char* op) {
    if (!v) throw DimensionError("f", std::string(op) + " needs a horizontal vector field, got a scalar field");
  };
  switch (kind) {
    case DiffKind::ddx:
      if (s) return ddx(*s);
      return HVectorField{ddx(v->x1), ddx(v->x2)};
    case DiffKind::ddy:
      if (s) return ddy(*s);
      return HVectorField{ddy(v->x1), ddy(v->x2)};
    case DiffKind::ddz:
      if (s) return ddz(*s);
      return ddz(*v);
    case DiffKind::laplace_h:
      if (s) return laplace_h(*s);
      return HVectorField{laplace_h(v->x1), laplace_h(v->x2)};
    case DiffKind::laplace3:
      if (s) return laplace3(*s);
      return HVectorField{laplace3(v->x1), laplace3(v->x2)};
    case DiffKind::grad_h:
      need_scalar("grad_h");
      return grad_h(*s);
    case DiffKind::div_h:
      need_vector("div_h");
      return div_h(*v);
    case DiffKind::curl_h:
      need_vector("curl_h");
      return curl_h(*v);
    case DiffKind::perp:
      need_vector("perp");
      v->x1.require_grid(g_, "f.x1");
      v->x2.require_grid(g_, "f.x2");
      return perp(*v);
  }
  throw ConfigError("unknown differential operator");
}

// Inverse operators ---------------------------------------------------------

void ChannelOps::dirichlet_column(int kidx, const cplx* in, cplx* out) const {
  const int nzp = g_.nzp();
  Eigen::MatrixXd rhs(nzp, 2);
  for (int k = 0; k < nzp; ++k) {
    rhs(k, 0) = in[k].real();
    rhs(k, 1) = in[k].imag();
  }
  rhs.row(0).setZero();
  rhs.row(nzp - 1).setZero();
  const Eigen::MatrixXd sol = dir_lu_[kidx].solve(rhs);
  for (int k = 0; k < nzp; ++k) out[k] = cplx(sol(k, 0), sol(k, 1));
  out[0] = 0.0;
  out[nzp - 1] = 0.0;
}

Spectrum ChannelOps::inv_laplace_dirichlet(const Spectrum& g) const {
  g.require_grid(g_, "spectrum");
  Spectrum r(g.shape());
  for (int i = 0; i < g_.nx(); ++i)
    for (int j = 0; j < g_.nyh(); ++j) dirichlet_column(ksq_index(i, j), &g(i, j, 0), &r(i, j, 0));
  return r;
}

ScalarField ChannelOps::inv_laplace_dirichlet(const ScalarField& g) const {
  if (!g.all_finite()) throw NumericalInstability("inv_laplace_dirichlet: non-finite input");
  ScalarField f = backward(inv_laplace_dirichlet(forward(g)));
  // Exact zeros on the walls rather than FFT round-off.
  for (int i = 0; i < g_.nx(); ++i)
    for (int j = 0; j < g_.ny(); ++j) f(i, j, 0) = f(i, j, g_.nz()) = 0.0;
  return f;
}

Spectrum ChannelOps::inv_laplace_neumann(const Spectrum& g, const SurfaceSpectrum& a, const SurfaceSpectrum& b,
                                         cplx* defect0) const {
  g.require_grid(g_, "spectrum");
  a.require_grid(g_, "bottom data");
  b.require_grid(g_, "top data");
  const int nzp = g_.nzp(), nz = g_.nz();
  Spectrum r(g.shape());
  Eigen::MatrixXd rhs(nzp, 2);
  for (int i = 0; i < g_.nx(); ++i)
    for (int j = 0; j < g_.nyh(); ++j) {
      for (int k = 0; k < nzp; ++k) {
        rhs(k, 0) = g(i, j, k).real();
        rhs(k, 1) = g(i, j, k).imag();
      }
      rhs(0, 0) = a(i, j, 0).real();
      rhs(0, 1) = a(i, j, 0).imag();
      rhs(nz, 0) = b(i, j, 0).real();
      rhs(nz, 1) = b(i, j, 0).imag();
      Eigen::MatrixXd sol;
      if (i == 0 && j == 0) {
        const auto w = g_.cc_weights();
        cplx integral = 0.0;
        for (int k = 0; k < nzp; ++k) integral += w[k] * g(0, 0, k);
        if (defect0) *defect0 = integral - (b(0, 0, 0) - a(0, 0, 0));
        Eigen::MatrixXd rb = Eigen::MatrixXd::Zero(nzp + 1, 2);
        rb.topRows(nzp) = rhs;
        sol = neu0_lu_.solve(rb).topRows(nzp);
      } else {
        sol = neu_lu_[ksq_index(i, j)].solve(rhs);
      }
      for (int k = 0; k < nzp; ++k) r(i, j, k) = cplx(sol(k, 0), sol(k, 1));
    }
  return r;
}

Spectrum ChannelOps::inv_laplace_h(const Spectrum& g) const {
  g.require_grid(g_, "spectrum");
  Spectrum r(g.shape());
  for (int i = 0; i < g_.nx(); ++i)
    for (int j = 0; j < g_.nyh(); ++j) {
      if (i == 0 && j == 0) continue;
      const double m = -1.0 / ksq(i, j);
      for (int k = 0; k < g_.nzp(); ++k) r(i, j, k) = m * g(i, j, k);
    }
  return r;
}

ScalarField ChannelOps::inv_laplace_h(const ScalarField& g) const { return backward(inv_laplace_h(forward(g))); }

BoundaryField ChannelOps::inv_laplace_h(const BoundaryField& g) const {
  SurfaceSpectrum s = forward(g);
  for (int i = 0; i < g_.nx(); ++i)
    for (int j = 0; j < g_.nyh(); ++j) s(i, j, 0) = (i == 0 && j == 0) ? cplx(0.0) : s(i, j, 0) / -ksq(i, j);
  return backward(s);
}

double ChannelOps::chi0(double z) const noexcept {
  const double h = g_.h();
  return smooth_step((0.75 * h - z) / (0.5 * h));
}

ScalarField ChannelOps::extend_boundary(const BoundaryField& a, const BoundaryField& b) const {
  a.require_grid(g_, "A");
  b.require_grid(g_, "B");
  const SurfaceSpectrum sa = forward(a);
  const SurfaceSpectrum sb = forward(b);
  const int nzp = g_.nzp();
  const double h = g_.h();
  std::vector<double> chi(nzp);
  for (int k = 0; k < nzp; ++k) chi[k] = chi0(g_.z(k));
  Spectrum s = Spectrum::zeros(g_);
  for (int i = 0; i < g_.nx(); ++i)
    for (int j = 0; j < g_.nyh(); ++j) {
      const int k1 = g_.kx(i);
      const double kmag = std::sqrt(static_cast<double>(k1 * k1 + j * j));
      for (int k = 0; k < nzp; ++k) {
        const double z = g_.z(k);
        s(i, j, k) = sa(i, j, 0) * (std::exp(-kmag * z) * chi[k]) + sb(i, j, 0) * (std::exp(-kmag * (h - z)) * (1.0 - chi[k]));
      }
    }
  ScalarField f = backward(s);
  for (int i = 0; i < g_.nx(); ++i)
    for (int j = 0; j < g_.ny(); ++j) {
      f(i, j, 0) = a(i, j, 0);
      f(i, j, g_.nz()) = b(i, j, 0);
    }
  return f;
}

Helmholtz1DResult ChannelOps::helmholtz_solve_1d(double k2, std::span<const cplx> rhs, const BoundaryCondition& bc) const {
  const int nzp = g_.nzp(), nz = g_.nz();
  if (static_cast<int>(rhs.size()) != nzp)
    throw DimensionError("rhs", "expected " + std::to_string(nzp) + " vertical values, got " + std::to_string(rhs.size()));
  if (!(k2 >= 0.0) || !std::isfinite(k2)) throw ConfigError("helmholtz_solve_1d: k2 must be a finite nonnegative number");
  for (const cplx& c : rhs)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw NumericalInstability("helmholtz_solve_1d: non-finite right-hand side");
  if (!std::isfinite(bc.a.real()) || !std::isfinite(bc.a.imag()) || !std::isfinite(bc.b.real()) || !std::isfinite(bc.b.imag()))
    throw NumericalInstability("helmholtz_solve_1d: non-finite boundary data");

  const Eigen::MatrixXd& d1 = g_.dz();
  const Eigen::MatrixXd& d2 = g_.dzz();
  Helmholtz1DResult out;
  out.values.resize(nzp);

  Eigen::MatrixXd r(nzp, 2);
  for (int k = 0; k < nzp; ++k) {
    r(k, 0) = rhs[k].real();
    r(k, 1) = rhs[k].imag();
  }
  r(0, 0) = bc.a.real();
  r(0, 1) = bc.a.imag();
  r(nz, 0) = bc.b.real();
  r(nz, 1) = bc.b.imag();

  Eigen::MatrixXd sol;
  if (bc.kind == BcKind::neumann && k2 == 0.0) {
    const auto w = g_.cc_weights();
    cplx integral = 0.0;
    for (int k = 0; k < nzp; ++k) integral += w[k] * rhs[k];
    out.defect = integral - (bc.b - bc.a);
    Eigen::MatrixXd rb = Eigen::MatrixXd::Zero(nzp + 1, 2);
    rb.topRows(nzp) = r;
    sol = neu0_lu_.solve(rb).topRows(nzp);
  } else {
    Eigen::MatrixXd a = d2 - k2 * Eigen::MatrixXd::Identity(nzp, nzp);
    if (bc.kind == BcKind::dirichlet) {
      a.row(0).setZero();
      a(0, 0) = 1.0;
      a.row(nz).setZero();
      a(nz, nz) = 1.0;
    } else {
      a.row(0) = d1.row(0);
      a.row(nz) = d1.row(nz);
    }
    sol = a.partialPivLu().solve(r);
  }
  for (int k = 0; k < nzp; ++k) out.values[k] = cplx(sol(k, 0), sol(k, 1));
  if (bc.kind == BcKind::dirichlet) {
    out.values[0] = bc.a;
    out.values[nz] = bc.b;
  }
  return out;
}

// Means, broadcasts, truncation, traces --------------------------------------

RealColumn ChannelOps::horizontal_mean(const ScalarField& f) const {
  f.require_grid(g_, "field");
  RealColumn c = RealColumn::zeros(g_);
  const int nzp = g_.nzp();
  for (int i = 0; i < g_.nx(); ++i)
    for (int j = 0; j < g_.ny(); ++j)
      for (int k = 0; k < nzp; ++k) c[k] += f(i, j, k);
  c *= 1.0 / (static_cast<double>(g_.nx()) * g_.ny());
  return c;
}

VProfile ChannelOps::horizontal_mean(const HVectorField& f) const {
  return {horizontal_mean(f.x1), horizontal_mean(f.x2)};
}

ScalarField ChannelOps::broadcast(const RealColumn& c) const {
  c.require_grid(g_, "profile");
  ScalarField f = ScalarField::zeros(g_);
  for (int i = 0; i < g_.nx(); ++i)
    for (int j = 0; j < g_.ny(); ++j)
      for (int k = 0; k < g_.nzp(); ++k) f(i, j, k) = c[k];
  return f;
}

HVectorField ChannelOps::broadcast(const VProfile& c) const { return {broadcast(c.x1), broadcast(c.x2)}; }

ScalarField ChannelOps::dealias(const ScalarField& f) const {
  if (!g_.dealias()) {
    f.require_grid(g_, "field");
    return f;
  }
  Spectrum s = forward(f);
  truncate(s);
  return backward(s);
}

HVectorField ChannelOps::dealias(const HVectorField& f) const { return {dealias(f.x1), dealias(f.x2)}; }

BoundaryField ChannelOps::dealias(const BoundaryField& f) const {
  if (!g_.dealias()) {
    f.require_grid(g_, "boundary field");
    return f;
  }
  SurfaceSpectrum s = forward(f);
  truncate(s);
  return backward(s);
}

BoundaryField ChannelOps::trace(const ScalarField& f, int k) const {
  f.require_grid(g_, "field");
  if (k < 0 || k > g_.nz()) throw DimensionError("k", "vertical index out of range");
  BoundaryField b = BoundaryField::zeros(g_);
  for (int i = 0; i < g_.nx(); ++i)
    for (int j = 0; j < g_.ny(); ++j) b(i, j, 0) = f(i, j, k);
  return b;
}

// Complex overloads ---------------------------------------------------------

CScalarField ChannelOps::ddx(const CScalarField& f) const { return make_complex(ddx(real_part(f)), ddx(imag_part(f))); }
CScalarField ChannelOps::ddy(const CScalarField& f) const { return make_complex(ddy(real_part(f)), ddy(imag_part(f))); }
CScalarField ChannelOps::ddz(const CScalarField& f) const { return make_complex(ddz(real_part(f)), ddz(imag_part(f))); }
CHVectorField ChannelOps::ddz(const CHVectorField& f) const { return {ddz(f.x1), ddz(f.x2)}; }
CHVectorField ChannelOps::grad_h(const CScalarField& f) const {
  return make_complex(grad_h(real_part(f)), grad_h(imag_part(f)));
}
CScalarField ChannelOps::div_h(const CHVectorField& f) const {
  return make_complex(div_h(real_part(f)), div_h(imag_part(f)));
}
CScalarField ChannelOps::curl_h(const CHVectorField& f) const {
  return make_complex(curl_h(real_part(f)), curl_h(imag_part(f)));
}
CScalarField ChannelOps::inv_laplace_dirichlet(const CScalarField& g) const {
  return make_complex(inv_laplace_dirichlet(real_part(g)), inv_laplace_dirichlet(imag_part(g)));
}
CScalarField ChannelOps::inv_laplace_h(const CScalarField& g) const {
  return make_complex(inv_laplace_h(real_part(g)), inv_laplace_h(imag_part(g)));
}
CVProfile ChannelOps::horizontal_mean(const CHVectorField& f) const {
  return make_complex(horizontal_mean(real_part(f)), horizontal_mean(imag_part(f)));
}
CHVectorField ChannelOps::broadcast(const CVProfile& c) const {
  return make_complex(broadcast(real_part(c)), broadcast(imag_part(c)));
}
CScalarField ChannelOps::dealias(const CScalarField& f) const {
  return make_complex(dealias(real_part(f)), dealias(imag_part(f)));
}
CHVectorField ChannelOps::dealias(const CHVectorField& f) const { return {dealias(f.x1), dealias(f.x2)}; }

}  // namespace gqg
