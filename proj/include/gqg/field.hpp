#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "gqg/errors.hpp"
#include "gqg/grid.hpp"

namespace gqg {

using cplx = std::complex<double>;

struct Shape {
  int n0 = 0, n1 = 0, n2 = 0;
  std::size_t size() const noexcept {
    return static_cast<std::size_t>(n0) * static_cast<std::size_t>(n1) * static_cast<std::size_t>(n2);
  }
  bool operator==(const Shape&) const = default;
  std::string str() const {
    return std::to_string(n0) + "x" + std::to_string(n1) + "x" + std::to_string(n2);
  }
};

// Nodes of the whole channel: Nx x Ny x (Nz+1), row-major [x][y][z].
struct VolumeTag {
  static Shape shape(const ChannelGrid& g) { return {g.nx(), g.ny(), g.nzp()}; }
};
// Nodes of a horizontal plane T^2: Nx x Ny.
struct SurfaceTag {
  static Shape shape(const ChannelGrid& g) { return {g.nx(), g.ny(), 1}; }
};
// Vertical nodes only: Nz+1.
struct ColumnTag {
  static Shape shape(const ChannelGrid& g) { return {1, 1, g.nzp()}; }
};

template <class T, class Tag>
class Nodal {
 public:
  using value_type = T;
  using tag_type = Tag;

  Nodal() = default;
  explicit Nodal(Shape s, T fill = T{}) : shape_(s), v_(s.size(), fill) {}
  static Nodal zeros(const ChannelGrid& g) { return Nodal(Tag::shape(g)); }
  static Nodal constant(const ChannelGrid& g, T c) { return Nodal(Tag::shape(g), c); }

  const Shape& shape() const noexcept { return shape_; }
  std::size_t size() const noexcept { return v_.size(); }
  bool empty() const noexcept { return v_.empty(); }

  T& operator()(int i, int j, int k) noexcept { return v_[index(i, j, k)]; }
  const T& operator()(int i, int j, int k) const noexcept { return v_[index(i, j, k)]; }
  T& operator[](std::size_t n) noexcept { return v_[n]; }
  const T& operator[](std::size_t n) const noexcept { return v_[n]; }

  std::span<T> values() noexcept { return v_; }
  std::span<const T> values() const noexcept { return v_; }
  T* data() noexcept { return v_.data(); }
  const T* data() const noexcept { return v_.data(); }

  std::size_t index(int i, int j, int k) const noexcept {
    return (static_cast<std::size_t>(i) * shape_.n1 + j) * shape_.n2 + k;
  }

  void require_shape(const Shape& s, const char* operand) const {
    if (shape_ != s) throw DimensionError(operand, "expected " + s.str() + ", got " + shape_.str());
  }
  void require_grid(const ChannelGrid& g, const char* operand) const { require_shape(Tag::shape(g), operand); }

  Nodal& operator+=(const Nodal& o) {
    o.require_shape(shape_, "rhs");
    for (std::size_t n = 0; n < v_.size(); ++n) v_[n] += o.v_[n];
    return *this;
  }
  Nodal& operator-=(const Nodal& o) {
    o.require_shape(shape_, "rhs");
    for (std::size_t n = 0; n < v_.size(); ++n) v_[n] -= o.v_[n];
    return *this;
  }
  Nodal& operator*=(T s) {
    for (auto& x : v_) x *= s;
    return *this;
  }
  // axpy: this += a * o
  Nodal& add_scaled(T a, const Nodal& o) {
    o.require_shape(shape_, "rhs");
    for (std::size_t n = 0; n < v_.size(); ++n) v_[n] += a * o.v_[n];
    return *this;
  }
  friend Nodal operator+(Nodal a, const Nodal& b) { return a += b; }
  friend Nodal operator-(Nodal a, const Nodal& b) { return a -= b; }
  friend Nodal operator*(Nodal a, T s) { return a *= s; }
  friend Nodal operator*(T s, Nodal a) { return a *= s; }
  friend Nodal operator-(Nodal a) { return a *= T(-1); }

  double max_abs() const noexcept {
    double m = 0.0;
    for (const auto& x : v_) m = std::max(m, static_cast<double>(std::abs(x)));
    return m;
  }
  bool all_finite() const noexcept {
    return std::all_of(v_.begin(), v_.end(), [](const T& x) {
      if constexpr (std::is_same_v<T, cplx>) return std::isfinite(x.real()) && std::isfinite(x.imag());
      else return std::isfinite(x);
    });
  }

 private:
  Shape shape_{};
  std::vector<T> v_;
};

template <class T>
using Volume = Nodal<T, VolumeTag>;
template <class T>
using Surface = Nodal<T, SurfaceTag>;
template <class T>
using Column = Nodal<T, ColumnTag>;

// Horizontal two-vector of fields; X^perp = (-X2, X1).
template <class F>
struct Vec2 {
  F x1, x2;

  static Vec2 zeros(const ChannelGrid& g) { return {F::zeros(g), F::zeros(g)}; }
  const Shape& shape() const noexcept { return x1.shape(); }

  Vec2& operator+=(const Vec2& o) {
    x1 += o.x1;
    x2 += o.x2;
    return *this;
  }
  Vec2& operator-=(const Vec2& o) {
    x1 -= o.x1;
    x2 -= o.x2;
    return *this;
  }
  template <class S>
  Vec2& operator*=(S s) {
    x1 *= s;
    x2 *= s;
    return *this;
  }
  template <class S>
  Vec2& add_scaled(S a, const Vec2& o) {
    x1.add_scaled(a, o.x1);
    x2.add_scaled(a, o.x2);
    return *this;
  }
  friend Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
  friend Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
  template <class S>
  friend Vec2 operator*(Vec2 a, S s) {
    return a *= s;
  }
  template <class S>
  friend Vec2 operator*(S s, Vec2 a) {
    return a *= s;
  }
  friend Vec2 operator-(Vec2 a) {
    a.x1 *= typename F::value_type(-1);
    a.x2 *= typename F::value_type(-1);
    return a;
  }
  double max_abs() const noexcept { return std::max(x1.max_abs(), x2.max_abs()); }
  bool all_finite() const noexcept { return x1.all_finite() && x2.all_finite(); }
};

template <class F>
Vec2<F> perp(const Vec2<F>& a) {
  return {-a.x2, a.x1};
}

using ScalarField = Volume<double>;
using CScalarField = Volume<cplx>;
using BoundaryField = Surface<double>;
using CBoundaryField = Surface<cplx>;
using HVectorField = Vec2<ScalarField>;
using CHVectorField = Vec2<CScalarField>;
using VProfile = Vec2<Column<double>>;
using CVProfile = Vec2<Column<cplx>>;
using RealColumn = Column<double>;
using ComplexColumn = Column<cplx>;

// Real/complex conversions --------------------------------------------------

template <class Tag>
Nodal<double, Tag> real_part(const Nodal<cplx, Tag>& a) {
  Nodal<double, Tag> r(a.shape());
  for (std::size_t n = 0; n < a.size(); ++n) r[n] = a[n].real();
  return r;
}
template <class Tag>
Nodal<double, Tag> imag_part(const Nodal<cplx, Tag>& a) {
  Nodal<double, Tag> r(a.shape());
  for (std::size_t n = 0; n < a.size(); ++n) r[n] = a[n].imag();
  return r;
}
template <class Tag>
Nodal<cplx, Tag> make_complex(const Nodal<double, Tag>& re, const Nodal<double, Tag>& im) {
  im.require_shape(re.shape(), "imag");
  Nodal<cplx, Tag> r(re.shape());
  for (std::size_t n = 0; n < re.size(); ++n) r[n] = cplx(re[n], im[n]);
  return r;
}
template <class Tag>
Nodal<cplx, Tag> to_complex(const Nodal<double, Tag>& re) {
  Nodal<cplx, Tag> r(re.shape());
  for (std::size_t n = 0; n < re.size(); ++n) r[n] = re[n];
  return r;
}
template <class Tag>
Nodal<cplx, Tag> conj(const Nodal<cplx, Tag>& a) {
  Nodal<cplx, Tag> r(a.shape());
  for (std::size_t n = 0; n < a.size(); ++n) r[n] = std::conj(a[n]);
  return r;
}
template <class F>
auto real_part(const Vec2<F>& a) {
  return Vec2<decltype(real_part(a.x1))>{real_part(a.x1), real_part(a.x2)};
}
template <class F>
auto imag_part(const Vec2<F>& a) {
  return Vec2<decltype(imag_part(a.x1))>{imag_part(a.x1), imag_part(a.x2)};
}
template <class F>
auto make_complex(const Vec2<F>& re, const Vec2<F>& im) {
  return Vec2<decltype(make_complex(re.x1, im.x1))>{make_complex(re.x1, im.x1), make_complex(re.x2, im.x2)};
}
template <class F>
auto to_complex(const Vec2<F>& a) {
  return Vec2<decltype(to_complex(a.x1))>{to_complex(a.x1), to_complex(a.x2)};
}
template <class F>
Vec2<F> conj(const Vec2<F>& a) {
  return {conj(a.x1), conj(a.x2)};
}

// Pointwise products --------------------------------------------------------

template <class A, class B, class Tag>
auto hadamard(const Nodal<A, Tag>& a, const Nodal<B, Tag>& b) {
  using R = decltype(A{} * B{});
  b.require_shape(a.shape(), "hadamard");
  Nodal<R, Tag> r(a.shape());
  for (std::size_t n = 0; n < a.size(); ++n) r[n] = a[n] * b[n];
  return r;
}

// a.b summed over the two components.
template <class FA, class FB>
auto dot(const Vec2<FA>& a, const Vec2<FB>& b) {
  auto r = hadamard(a.x1, b.x1);
  r += hadamard(a.x2, b.x2);
  return r;
}

}  // namespace gqg
