#include "gqg/grid.hpp"

#include <cmath>
#include <numbers>

#include "gqg/errors.hpp"

namespace gqg {

namespace cheb {

Eigen::MatrixXd diff_matrix(int n) {
  using std::numbers::pi;
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n + 1, n + 1);
  if (n == 0) return d;
  auto c = [n](int j) { return (j == 0 || j == n ? 2.0 : 1.0) * (j % 2 == 0 ? 1.0 : -1.0); };
  for (int i = 0; i <= n; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j <= n; ++j) {
      if (i == j) continue;
      // x_i - x_j via the product formula avoids cancellation near the ends.
      const double diff = 2.0 * std::sin(pi * (i + j) / (2.0 * n)) * std::sin(pi * (j - i) / (2.0 * n));
      d(i, j) = (c(i) / c(j)) / diff;
      row_sum += d(i, j);
    }
    d(i, i) = -row_sum;
  }
  return d;
}

std::vector<double> cc_weights(int n) {
  using std::numbers::pi;
  std::vector<double> w(n + 1, 0.0);
  if (n == 0) {
    w[0] = 2.0;
    return w;
  }
  std::vector<double> v(n > 1 ? n - 1 : 0, 1.0);
  if (n % 2 == 0) {
    w[0] = w[n] = 1.0 / (n * n - 1.0);
    for (int k = 1; k < n / 2; ++k)
      for (int j = 1; j < n; ++j) v[j - 1] -= 2.0 * std::cos(2.0 * k * pi * j / n) / (4.0 * k * k - 1.0);
    for (int j = 1; j < n; ++j) v[j - 1] -= std::cos(pi * j) / (n * n - 1.0);
  } else {
    w[0] = w[n] = 1.0 / (n * n);
    for (int k = 1; k <= (n - 1) / 2; ++k)
      for (int j = 1; j < n; ++j) v[j - 1] -= 2.0 * std::cos(2.0 * k * pi * j / n) / (4.0 * k * k - 1.0);
  }
  for (int j = 1; j < n; ++j) w[j] = 2.0 * v[j - 1] / n;
  return w;
}

}  // namespace cheb

ChannelGrid::ChannelGrid(int nx, int ny, int nz, double h, bool dealias)
    : nx_(nx), ny_(ny), nz_(nz), h_(h), dealias_(dealias) {
  if (nx <= 0 || ny <= 0 || nx % 2 != 0 || ny % 2 != 0)
    throw ConfigError("grid: Nx and Ny must be positive even integers");
  if (nz < 2) throw ConfigError("grid: Nz must be at least 2");
  if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("grid: channel height must be positive");

  using std::numbers::pi;
  z_.resize(nz + 1);
  for (int k = 0; k <= nz; ++k) {
    // (h/2)(1 - cos(pi k/Nz)) written as h sin^2 to keep the endpoints exact.
    const double s = std::sin(pi * k / (2.0 * nz));
    z_[k] = h * s * s;
  }
  z_[0] = 0.0;
  z_[nz] = h;

  w_ = cheb::cc_weights(nz);
  for (double& wk : w_) wk *= 0.5 * h;

  // z = (h/2)(1 - x) reverses orientation: d/dz = -(2/h) d/dx on the same node order.
  d1_ = -(2.0 / h) * cheb::diff_matrix(nz);
  d2_ = d1_ * d1_;
}

bool ChannelGrid::retained(int k1, int k2) const noexcept {
  if (!dealias_) return true;
  return 3 * std::abs(k1) <= nx_ && 3 * std::abs(k2) <= ny_;
}

double ChannelGrid::dx_min() const noexcept { return std::min(1.0 / nx_, 1.0 / ny_); }

}  // namespace gqg
