#pragma once
// Periodic forward differences per axis, their DFT diagonalization, and the
// adjoint.
//
// The 1D difference matrix K has rows (Ku)_j = u_{j+1} - u_j (periodic); with
// the project DFT convention its eigenvalue at frequency l is
// lambda_l = exp(2*pi*i*l/n) - 1, zero exactly at l = 0.  Axis i of the
// d-dimensional gradient applies K along that axis, so the Fourier multiplier
// of component i at multi-frequency (l0,...,l_{d-1}) is lambda_{l_i}.

#include <complex>
#include <vector>

#include "tvcs/fft.hpp"
#include "tvcs/grid.hpp"

namespace tvcs {

// Eigenvalues of the n x n periodic forward-difference matrix, DFT ordering.
template <class Real>
std::vector<std::complex<Real>> difference_eigenvalues(int n) {
  if (n < 1) throw std::invalid_argument("difference_eigenvalues: n >= 1 required");
  std::vector<std::complex<Real>> lam(static_cast<std::size_t>(n));
  lam[0] = std::complex<Real>(0, 0);
  for (int l = 1; l < n; ++l) {
    double t = 6.283185307179586476925286766559 * l / n;
    lam[l] = std::complex<Real>(Real(std::cos(t) - 1.0), Real(std::sin(t)));
  }
  return lam;
}

// (K u)^i_j = u_{j + e_i} - u_j, periodic per axis.
template <class Real>
VectorField<Real> gradient(const Image<Real>& u) {
  const GridShape& s = u.shape;
  VectorField<Real> g(s);
  const int n0 = s.n[0], n1 = s.n[1], n2 = s.n[2];
  for (int k = 0; k < n2; ++k)
    for (int j = 0; j < n1; ++j) {
      const index_t row = s.flat(0, j, k);
      const index_t rowj = s.flat(0, (j + 1 == n1) ? 0 : j + 1, k);
      const index_t rowk = s.flat(0, j, (k + 1 == n2) ? 0 : k + 1);
      for (int i = 0; i < n0; ++i) {
        const index_t p = row + i;
        g.c[0][p] = u.v[row + ((i + 1 == n0) ? 0 : i + 1)] - u.v[p];
        if (s.d >= 2) g.c[1][p] = u.v[rowj + i] - u.v[p];
        if (s.d == 3) g.c[2][p] = u.v[rowk + i] - u.v[p];
      }
    }
  return g;
}

// Exact adjoint of gradient: (K^T p)_j = sum_i p^i_{j - e_i} - p^i_j.
template <class Real>
Image<Real> divergence(const VectorField<Real>& p) {
  const GridShape& s = p.shape;
  Image<Real> out(s);
  const int n0 = s.n[0], n1 = s.n[1], n2 = s.n[2];
  for (int k = 0; k < n2; ++k)
    for (int j = 0; j < n1; ++j) {
      const index_t row = s.flat(0, j, k);
      const index_t rowjm = s.flat(0, (j == 0) ? n1 - 1 : j - 1, k);
      const index_t rowkm = s.flat(0, j, (k == 0) ? n2 - 1 : k - 1);
      for (int i = 0; i < n0; ++i) {
        const index_t q = row + i;
        Real acc = p.c[0][row + ((i == 0) ? n0 - 1 : i - 1)] - p.c[0][q];
        if (s.d >= 2) acc += p.c[1][rowjm + i] - p.c[1][q];
        if (s.d == 3) acc += p.c[2][rowkm + i] - p.c[2][q];
        out.v[q] = acc;
      }
    }
  return out;
}

// Eigentables of the d difference operators on the flattened frequency grid,
// the shared denominator D_l = sum_i |lambda^i_l|^2, and the DFT pair.
template <class Real>
struct SpectralOperator {
  GridShape shape;
  std::array<std::vector<std::complex<Real>>, 3> lam;  // per axis, length N each
  std::vector<Real> denom;                             // zero only at frequency 0
  UnitaryDft<Real> dft;

  explicit SpectralOperator(const GridShape& s) : shape(s), dft(s) {
    const index_t nn = s.size();
    std::array<std::vector<std::complex<Real>>, 3> axis;
    for (int i = 0; i < s.d; ++i) {
      axis[i] = difference_eigenvalues<Real>(s.n[i]);
      lam[i].resize(static_cast<std::size_t>(nn));
    }
    denom.assign(static_cast<std::size_t>(nn), Real(0));
    for (int l2 = 0; l2 < s.n[2]; ++l2)
      for (int l1 = 0; l1 < s.n[1]; ++l1)
        for (int l0 = 0; l0 < s.n[0]; ++l0) {
          const index_t f = s.flat(l0, l1, l2);
          const int li[3] = {l0, l1, l2};
          Real d2 = 0;
          for (int i = 0; i < s.d; ++i) {
            std::complex<Real> lv = axis[i][li[i]];
            lam[i][f] = lv;
            d2 += std::norm(lv);
          }
          denom[f] = d2;
        }
  }
};

}  // namespace tvcs
