#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace gqg {

// Discretization of the periodic channel T^2 x (0, h): uniform periodic nodes
// x_i = i/Nx, y_j = j/Ny and Chebyshev-Gauss-Lobatto nodes
// z_k = (h/2)(1 - cos(pi k / Nz)), k = 0..Nz, so z_0 = 0 and z_Nz = h.
class ChannelGrid {
 public:
  ChannelGrid(int nx, int ny, int nz, double h = 1.0, bool dealias = true);

  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  int nz() const noexcept { return nz_; }
  int nzp() const noexcept { return nz_ + 1; }
  int nyh() const noexcept { return ny_ / 2 + 1; }
  double h() const noexcept { return h_; }
  bool dealias() const noexcept { return dealias_; }

  double x(int i) const noexcept { return static_cast<double>(i) / nx_; }
  double y(int j) const noexcept { return static_cast<double>(j) / ny_; }
  double z(int k) const noexcept { return z_[k]; }
  std::span<const double> z_nodes() const noexcept { return z_; }

  // Clenshaw-Curtis weights on the vertical nodes; they integrate over [0, h].
  std::span<const double> cc_weights() const noexcept { return w_; }

  // Collocation differentiation matrices d/dz and d^2/dz^2 on the vertical nodes.
  const Eigen::MatrixXd& dz() const noexcept { return d1_; }
  const Eigen::MatrixXd& dzz() const noexcept { return d2_; }

  // Integer wavenumber for FFT index i along x (full range) and j along y
  // (r2c half range). The set is {-N/2+1, ..., N/2}.
  int kx(int i) const noexcept { return i <= nx_ / 2 ? i : i - nx_; }
  int ky(int j) const noexcept { return j <= ny_ / 2 ? j : j - ny_; }

  // 2/3-rule retention test for integer wavenumbers.
  bool retained(int k1, int k2) const noexcept;

  double dx_min() const noexcept;
  double dz_min() const noexcept { return z_[1] - z_[0]; }

  bool same_shape(const ChannelGrid& o) const noexcept {
    return nx_ == o.nx_ && ny_ == o.ny_ && nz_ == o.nz_ && h_ == o.h_;
  }

 private:
  int nx_, ny_, nz_;
  double h_;
  bool dealias_;
  std::vector<double> z_;
  std::vector<double> w_;
  Eigen::MatrixXd d1_;
  Eigen::MatrixXd d2_;
};

namespace cheb {
// Trefethen-style collocation matrix on x_j = cos(pi j / n), j = 0..n.
Eigen::MatrixXd diff_matrix(int n);
// Clenshaw-Curtis weights for the same nodes on [-1, 1].
std::vector<double> cc_weights(int n);
}  // namespace cheb

}  // namespace gqg
