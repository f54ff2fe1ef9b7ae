#pragma once
// Periodic d-dimensional grids (1 <= d <= 3), real images over them, and
// per-axis vector fields.
//
// Flattening convention: axis 0 is fastest-varying, i.e. the flat index of
// (j0, j1, j2) is j0 + n0*(j1 + n1*j2).  A worked 2x2 example lives in the
// README.  Frequencies use the same flattening; the zero frequency is flat
// index 0.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <vector>

#include "tvcs/util.hpp"

namespace tvcs {

using index_t = std::int64_t;

struct GridShape {
  std::array<int, 3> n{1, 1, 1};  // extents; axes >= d stay 1
  int d = 0;

  GridShape() = default;
  GridShape(std::initializer_list<int> dims)
      : GridShape(std::vector<int>(dims)) {}
  explicit GridShape(const std::vector<int>& dims) {
    if (dims.empty() || dims.size() > 3)
      throw std::invalid_argument("GridShape: 1 <= d <= 3 required");
    d = static_cast<int>(dims.size());
    for (int i = 0; i < d; ++i) {
      if (dims[i] < 1) throw std::invalid_argument("GridShape: extents must be positive");
      n[i] = dims[i];
    }
  }

  index_t size() const {
    return static_cast<index_t>(n[0]) * n[1] * n[2];
  }

  index_t flat(int j0, int j1 = 0, int j2 = 0) const {
    return j0 + static_cast<index_t>(n[0]) * (j1 + static_cast<index_t>(n[1]) * j2);
  }

  std::array<int, 3> unflat(index_t f) const {
    std::array<int, 3> j;
    j[0] = static_cast<int>(f % n[0]);
    f /= n[0];
    j[1] = static_cast<int>(f % n[1]);
    j[2] = static_cast<int>(f / n[1]);
    return j;
  }

  // Flat index of the negated multi-frequency (-l mod n per axis).
  index_t negate(index_t f) const {
    auto j = unflat(f);
    for (int i = 0; i < 3; ++i) j[i] = (n[i] - j[i]) % n[i];
    return flat(j[0], j[1], j[2]);
  }

  bool operator==(const GridShape& o) const { return n == o.n && d == o.d; }
  bool operator!=(const GridShape& o) const { return !(*this == o); }
};

template <class Real>
struct Image {
  GridShape shape;
  std::vector<Real> v;

  Image() = default;
  explicit Image(const GridShape& s) : shape(s), v(static_cast<std::size_t>(s.size()), Real(0)) {}
};

// d stacked real arrays; the block at spatial index j is (c[0][j], ..., c[d-1][j]).
template <class Real>
struct VectorField {
  GridShape shape;
  std::array<std::vector<Real>, 3> c;

  VectorField() = default;
  explicit VectorField(const GridShape& s) : shape(s) {
    for (int i = 0; i < s.d; ++i) c[i].assign(static_cast<std::size_t>(s.size()), Real(0));
  }
};

template <class Real>
double norm2(const Image<Real>& u) {
  double s = 0;
  for (Real x : u.v) s += double(x) * double(x);
  return std::sqrt(s);
}

template <class Real>
double norm2(const VectorField<Real>& p) {
  double s = 0;
  for (int i = 0; i < p.shape.d; ++i)
    for (Real x : p.c[i]) s += double(x) * double(x);
  return std::sqrt(s);
}

template <class Real>
double dot(const Image<Real>& a, const Image<Real>& b) {
  if (a.shape != b.shape) throw std::invalid_argument("dot: shape mismatch");
  double s = 0;
  for (std::size_t j = 0; j < a.v.size(); ++j) s += double(a.v[j]) * double(b.v[j]);
  return s;
}

template <class Real>
double dot(const VectorField<Real>& a, const VectorField<Real>& b) {
  if (a.shape != b.shape) throw std::invalid_argument("dot: shape mismatch");
  double s = 0;
  for (int i = 0; i < a.shape.d; ++i)
    for (std::size_t j = 0; j < a.c[i].size(); ++j) s += double(a.c[i][j]) * double(b.c[i][j]);
  return s;
}

template <class Real>
double dist2(const VectorField<Real>& a, const VectorField<Real>& b) {
  if (a.shape != b.shape) throw std::invalid_argument("dist2: shape mismatch");
  double s = 0;
  for (int i = 0; i < a.shape.d; ++i)
    for (std::size_t j = 0; j < a.c[i].size(); ++j) {
      double t = double(a.c[i][j]) - double(b.c[i][j]);
      s += t * t;
    }
  return std::sqrt(s);
}

// out = x + s*y
template <class Real>
void axpy(VectorField<Real>& out, const VectorField<Real>& x, Real s, const VectorField<Real>& y) {
  for (int i = 0; i < x.shape.d; ++i)
    for (std::size_t j = 0; j < x.c[i].size(); ++j) out.c[i][j] = x.c[i][j] + s * y.c[i][j];
}

template <class RealTo, class RealFrom>
Image<RealTo> convert_image(const Image<RealFrom>& u, double* max_err = nullptr) {
  Image<RealTo> out(u.shape);
  double worst = 0;
  for (std::size_t j = 0; j < u.v.size(); ++j) {
    out.v[j] = static_cast<RealTo>(u.v[j]);
    double e = std::abs(double(u.v[j]) - double(out.v[j]));
    if (e > worst) worst = e;
  }
  if (max_err) *max_err = worst;
  return out;
}

template <class RealTo, class RealFrom>
VectorField<RealTo> convert_field(const VectorField<RealFrom>& p, double* max_err = nullptr) {
  VectorField<RealTo> out(p.shape);
  double worst = 0;
  for (int i = 0; i < p.shape.d; ++i)
    for (std::size_t j = 0; j < p.c[i].size(); ++j) {
      out.c[i][j] = static_cast<RealTo>(p.c[i][j]);
      double e = std::abs(double(p.c[i][j]) - double(out.c[i][j]));
      if (e > worst) worst = e;
    }
  if (max_err) *max_err = worst;
  return out;
}

template <class Real>
Image<Real> random_image(const GridShape& s, Rng& rng) {
  Image<Real> u(s);
  for (auto& x : u.v) x = static_cast<Real>(rng.normal());
  return u;
}

template <class Real>
VectorField<Real> random_field(const GridShape& s, Rng& rng) {
  VectorField<Real> p(s);
  for (int i = 0; i < s.d; ++i)
    for (auto& x : p.c[i]) x = static_cast<Real>(rng.normal());
  return p;
}

}  // namespace tvcs
