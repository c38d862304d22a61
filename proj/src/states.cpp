#include "gqg/states.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <sstream>

#include "gqg/errors.hpp"
#include "gqg/gpv.hpp"

namespace gqg {

namespace {

// Parseval weight for the r2c half plane.
double half_weight(const ChannelGrid& g, int j) { return (j == 0 || 2 * j == g.ny()) ? 1.0 : 2.0; }

double kx_of(const ChannelOps& ops, int i) { return ops.ikx(i).imag(); }
double ky_of(const ChannelOps& ops, int j) { return ops.iky(j).imag(); }

// sum_{a+b<=m} kx^{2a} ky^{2b}
double tower(double kx2, double ky2, int m) {
  double total = 0.0, pa = 1.0;
  for (int a = 0; a <= m; ++a) {
    double pb = 1.0;
    for (int b = 0; a + b <= m; ++b) {
      total += pa * pb;
      pb *= ky2;
    }
    pa *= kx2;
  }
  return total;
}

// Per-mode integral over z of |S|^2, Parseval weight included.
std::vector<double> column_energy(const ChannelOps& ops, const Spectrum& s) {
  const ChannelGrid& g = ops.grid();
  const auto w = g.cc_weights();
  std::vector<double> e(static_cast<std::size_t>(g.nx()) * g.nyh(), 0.0);
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.nyh(); ++j) {
      double acc = 0.0;
      for (int k = 0; k < g.nzp(); ++k) acc += w[k] * std::norm(s(i, j, k));
      e[static_cast<std::size_t>(i) * g.nyh() + j] = half_weight(g, j) * acc;
    }
  return e;
}

double column_norm_sq(const ChannelOps& ops, const RealColumn& f, int s) {
  const auto w = ops.grid().cc_weights();
  double total = 0.0;
  RealColumn d = f;
  for (int c = 0; c <= s; ++c) {
    for (std::size_t k = 0; k < d.size(); ++k) total += w[k] * d[k] * d[k];
    if (c < s) d = ops.ddz(d);
  }
  return total;
}

void check_order(int s) {
  if (s < 0 || s > 3) throw ConfigError("sobolev_norm: order must be in 0..3");
}

}  // namespace

// Diagnostics record ---------------------------------------------------------

const char* DiagnosticsRecord::csv_header() {
  return "t,E_frak,l2_energy,h3_norm,div_residual,bc_residual,mean_residual,compat_residual";
}

std::string DiagnosticsRecord::csv_row() const {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", t, E_frak, l2_energy, h3_norm,
                div_residual, bc_residual, mean_residual, compat_residual);
  return buf;
}

DiagnosticsRecord DiagnosticsRecord::parse_csv_row(const std::string& line) {
  std::vector<double> vals;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    char* end = nullptr;
    const double x = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str()) throw IoError("diagnostics row: cannot parse '" + cell + "'");
    vals.push_back(x);
  }
  if (vals.size() != 8) throw IoError("diagnostics row: expected 8 columns, got " + std::to_string(vals.size()));
  return {vals[0], vals[1], vals[2], vals[3], vals[4], vals[5], vals[6], vals[7]};
}

bool DiagnosticsRecord::all_finite() const {
  for (double x : {t, E_frak, l2_energy, h3_norm, div_residual, bc_residual, mean_residual, compat_residual})
    if (!std::isfinite(x)) return false;
  return true;
}

// Validators ---------------------------------------------------------------

PrimitiveReport validate_primitive(const ChannelOps& ops, const PrimitiveState& p, double tol) {
  const ChannelGrid& g = ops.grid();
  ScalarField div = ops.div_h(p.v);
  div += ops.ddz(p.w);
  PrimitiveReport r;
  r.div_residual = std::sqrt(std::max(0.0, inner(ops, div, div)));
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j)
      r.bc_residual = std::max({r.bc_residual, std::abs(p.w(i, j, 0)), std::abs(p.w(i, j, g.nz()))});
  r.pass = r.div_residual <= tol && r.bc_residual <= tol;
  return r;
}

GPVReport validate_gpv(const ChannelOps& ops, const GPVState& s, double tol) {
  GPVReport r;
  const VProfile m = ops.horizontal_mean(s.Psi);
  const VProfile dz = ops.ddz(s.Z);
  for (std::size_t k = 0; k < m.x1.size(); ++k)
    r.mean_residual = std::max({r.mean_residual, std::abs(m.x1[k] + dz.x1[k]), std::abs(m.x2[k] + dz.x2[k])});
  r.compat_residual = std::abs(integrate(ops, s.Phi) - (integrate(ops, s.Hh) - integrate(ops, s.H0)));
  r.pass = r.mean_residual <= tol && r.compat_residual <= tol;
  return r;
}

LimitReport validate_limit(const ChannelOps& ops, const LimitState& L, double tol) {
  LimitReport r;
  r.compat_residual = std::abs(integrate(ops, L.Phi_p) - (integrate(ops, L.Hph) - integrate(ops, L.Hp0)));
  r.pass = r.compat_residual <= tol;
  return r;
}

// Norms --------------------------------------------------------------------

double sobolev_norm_sq(const ChannelOps& ops, const ScalarField& f, int s) {
  check_order(s);
  const ChannelGrid& g = ops.grid();
  Spectrum d = ops.forward(f);
  double total = 0.0;
  for (int c = 0; c <= s; ++c) {
    const std::vector<double> e = column_energy(ops, d);
    for (int i = 0; i < g.nx(); ++i) {
      const double kx2 = kx_of(ops, i) * kx_of(ops, i);
      for (int j = 0; j < g.nyh(); ++j) {
        const double ky2 = ky_of(ops, j) * ky_of(ops, j);
        total += tower(kx2, ky2, s - c) * e[static_cast<std::size_t>(i) * g.nyh() + j];
      }
    }
    if (c < s) d = ops.sdz(d);
  }
  return total;
}

double sobolev_norm_sq(const ChannelOps& ops, const HVectorField& f, int s) {
  return sobolev_norm_sq(ops, f.x1, s) + sobolev_norm_sq(ops, f.x2, s);
}
double sobolev_norm_sq(const ChannelOps& ops, const CScalarField& f, int s) {
  return sobolev_norm_sq(ops, real_part(f), s) + sobolev_norm_sq(ops, imag_part(f), s);
}
double sobolev_norm_sq(const ChannelOps& ops, const CHVectorField& f, int s) {
  return sobolev_norm_sq(ops, f.x1, s) + sobolev_norm_sq(ops, f.x2, s);
}
double sobolev_norm_sq(const ChannelOps& ops, const RealColumn& f, int s) {
  check_order(s);
  f.require_grid(ops.grid(), "profile");
  return column_norm_sq(ops, f, s);
}
double sobolev_norm_sq(const ChannelOps& ops, const VProfile& f, int s) {
  return sobolev_norm_sq(ops, f.x1, s) + sobolev_norm_sq(ops, f.x2, s);
}
double sobolev_norm_sq(const ChannelOps& ops, const CVProfile& f, int s) {
  return sobolev_norm_sq(ops, real_part(f.x1), s) + sobolev_norm_sq(ops, imag_part(f.x1), s) +
         sobolev_norm_sq(ops, real_part(f.x2), s) + sobolev_norm_sq(ops, imag_part(f.x2), s);
}

double sobolev_norm(const ChannelOps& ops, std::initializer_list<FieldRef> fields, int s) {
  double total = 0.0;
  for (const FieldRef& f : fields)
    total += std::visit([&](const auto& ref) { return sobolev_norm_sq(ops, ref.get(), s); }, f);
  return std::sqrt(total);
}

double boundary_norm(const ChannelOps& ops, const BoundaryField& a, double s) {
  const ChannelGrid& g = ops.grid();
  const SurfaceSpectrum sa = ops.forward(a);
  double total = 0.0;
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.nyh(); ++j)
      total += half_weight(g, j) * std::pow(1.0 + ops.ksq(i, j), s) * std::norm(sa(i, j, 0));
  return std::sqrt(total);
}

double integrate(const ChannelOps& ops, const ScalarField& f) {
  const ChannelGrid& g = ops.grid();
  f.require_grid(g, "field");
  const auto w = g.cc_weights();
  double total = 0.0;
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j)
      for (int k = 0; k < g.nzp(); ++k) total += w[k] * f(i, j, k);
  return total / (static_cast<double>(g.nx()) * g.ny());
}

double integrate(const ChannelOps& ops, const BoundaryField& f) {
  const ChannelGrid& g = ops.grid();
  f.require_grid(g, "boundary field");
  double total = 0.0;
  for (std::size_t n = 0; n < f.size(); ++n) total += f[n];
  return total / (static_cast<double>(g.nx()) * g.ny());
}

double inner(const ChannelOps& ops, const ScalarField& a, const ScalarField& b) {
  const ChannelGrid& g = ops.grid();
  a.require_grid(g, "a");
  b.require_grid(g, "b");
  const auto w = g.cc_weights();
  const int nzp = g.nzp();
  double total = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) total += w[n % nzp] * a[n] * b[n];
  return total / (static_cast<double>(g.nx()) * g.ny());
}

double l2_energy(const ChannelOps& ops, const PrimitiveState& p) {
  return inner(ops, p.v.x1, p.v.x1) + inner(ops, p.v.x2, p.v.x2) + inner(ops, p.w, p.w) +
         inner(ops, p.theta, p.theta);
}

double energy_functional(const ChannelOps& ops, const PrimitiveState& p) {
  const ChannelGrid& g = ops.grid();
  const GPVState gp = extract_gpv(ops, p);
  const double pv = std::sqrt(sobolev_norm_sq(ops, gp.Phi, 2)) + std::sqrt(sobolev_norm_sq(ops, gp.Psi, 2));
  double total = pv * pv;

  // Column energies of each primitive component; v counts both components.
  std::vector<double> ev = column_energy(ops, ops.forward(p.v.x1));
  {
    const std::vector<double> e2 = column_energy(ops, ops.forward(p.v.x2));
    for (std::size_t n = 0; n < ev.size(); ++n) ev[n] += e2[n];
  }
  const std::vector<double> ew = column_energy(ops, ops.forward(p.w));
  const std::vector<double> et = column_energy(ops, ops.forward(p.theta));

  for (int dir = 0; dir < 2; ++dir)
    for (int alpha = 0; alpha <= 3; ++alpha) {
      double nv = 0.0, nw = 0.0, nt = 0.0;
      for (int i = 0; i < g.nx(); ++i)
        for (int j = 0; j < g.nyh(); ++j) {
          const double kk = dir == 0 ? kx_of(ops, i) : ky_of(ops, j);
          const double m = std::pow(kk * kk, alpha);
          const std::size_t n = static_cast<std::size_t>(i) * g.nyh() + j;
          nv += m * ev[n];
          nw += m * ew[n];
          nt += m * et[n];
        }
      const double sum = std::sqrt(nv) + std::sqrt(nw) + std::sqrt(nt);
      total += sum * sum;
    }
  return total;
}

double trig_sup_norm(const ChannelOps& ops, const BoundaryField& a) {
  using std::numbers::pi;
  const ChannelGrid& g = ops.grid();
  const SurfaceSpectrum s = ops.forward(a);
  const int nx = g.nx(), nyh = g.nyh();

  struct Mode {
    double kx, ky;
    cplx c;
  };
  std::vector<Mode> modes;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < nyh; ++j)
      if (std::abs(s(i, j, 0)) > 0.0)
        modes.push_back({2.0 * pi * g.kx(i), 2.0 * pi * j, half_weight(g, j) * s(i, j, 0)});

  // value, gradient and Hessian of the real interpolant at (x, y)
  auto eval = [&](double x, double y, double* d) {
    for (int q = 0; q < 6; ++q) d[q] = 0.0;
    for (const Mode& m : modes) {
      const cplx e = m.c * std::exp(cplx(0.0, m.kx * x + m.ky * y));
      const double re = e.real(), im = e.imag();
      d[0] += re;
      d[1] += -m.kx * im;
      d[2] += -m.ky * im;
      d[3] += -m.kx * m.kx * re;
      d[4] += -m.kx * m.ky * re;
      d[5] += -m.ky * m.ky * re;
    }
  };

  // Padded grid by separable evaluation.
  const int px = 4 * nx, py = 4 * g.ny();
  std::vector<double> fine(static_cast<std::size_t>(px) * py, 0.0);
  {
    std::vector<cplx> partial(static_cast<std::size_t>(nx) * py);
    for (int i = 0; i < nx; ++i)
      for (int q = 0; q < py; ++q) {
        cplx acc = 0.0;
        const double y = static_cast<double>(q) / py;
        for (int j = 0; j < nyh; ++j) acc += half_weight(g, j) * s(i, j, 0) * std::exp(cplx(0.0, 2.0 * pi * j * y));
        partial[static_cast<std::size_t>(i) * py + q] = acc;
      }
    for (int p = 0; p < px; ++p) {
      const double x = static_cast<double>(p) / px;
      for (int i = 0; i < nx; ++i) {
        const cplx e = std::exp(cplx(0.0, 2.0 * pi * g.kx(i) * x));
        for (int q = 0; q < py; ++q) fine[static_cast<std::size_t>(p) * py + q] += (e * partial[static_cast<std::size_t>(i) * py + q]).real();
      }
    }
  }

  double best = 0.0;
  std::vector<std::pair<double, int>> cand;
  for (int p = 0; p < px; ++p)
    for (int q = 0; q < py; ++q) {
      const double v = std::abs(fine[static_cast<std::size_t>(p) * py + q]);
      best = std::max(best, v);
      bool peak = true;
      for (int dp = -1; dp <= 1 && peak; ++dp)
        for (int dq = -1; dq <= 1; ++dq) {
          if (dp == 0 && dq == 0) continue;
          const int pp = (p + dp + px) % px, qq = (q + dq + py) % py;
          if (std::abs(fine[static_cast<std::size_t>(pp) * py + qq]) > v) {
            peak = false;
            break;
          }
        }
      if (peak) cand.push_back({v, p * py + q});
    }
  std::sort(cand.begin(), cand.end(), [](const auto& l, const auto& r) { return l.first > r.first; });
  if (cand.size() > 8) cand.resize(8);

  const double cell = 1.0 / std::max(px, py);
  for (const auto& [v0, idx] : cand) {
    double x = static_cast<double>(idx / py) / px, y = static_cast<double>(idx % py) / py;
    const double x0 = x, y0 = y;
    double d[6];
    for (int it = 0; it < 30; ++it) {
      eval(x, y, d);
      const double det = d[3] * d[5] - d[4] * d[4];
      if (!(std::abs(det) > 0.0)) break;
      const double sx = (d[5] * d[1] - d[4] * d[2]) / det;
      const double sy = (d[3] * d[2] - d[4] * d[1]) / det;
      x -= sx;
      y -= sy;
      if (std::abs(x - x0) > 2 * cell || std::abs(y - y0) > 2 * cell) break;
      if (std::abs(sx) + std::abs(sy) < 1e-15) break;
    }
    if (std::abs(x - x0) <= 2 * cell && std::abs(y - y0) <= 2 * cell) {
      eval(x, y, d);
      best = std::max(best, std::abs(d[0]));
    }
  }
  return best;
}

}  // namespace gqg
