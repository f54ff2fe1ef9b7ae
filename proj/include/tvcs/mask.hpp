#pragma once
// Fourier sampling masks and measurement synthesis.
//
// Masks always contain the zero frequency; by default they are closed under
// frequency negation so real images stay real through the solvers.  The
// unsymmetrized escape hatch samples plain indices and downstream code then
// takes real parts without the conjugate-symmetry guard.

#include <complex>
#include <cstdint>
#include <vector>

#include "tvcs/grid.hpp"

namespace tvcs {

struct SamplingMask {
  GridShape shape;
  std::vector<index_t> omega;           // sorted flat frequency indices; 0 present
  std::vector<std::complex<double>> b;  // aligned with omega; empty until measured
  double fraction = 0;
  std::uint64_t seed = 0;
  bool symmetric = true;

  // position of flat frequency l in omega, or -1
  index_t find(index_t l) const;
};

// Uniformly random mask of ceil(fraction*N) indices (by conjugate orbits when
// symmetrize is set; the final size then overshoots by at most one index).
SamplingMask sample_mask(const GridShape& shape, double fraction, std::uint64_t seed,
                         bool symmetrize = true);

// b_l = (dft u)_l on omega; conjugate symmetry is made exact, not left to FFT
// rounding, when the mask is symmetric.
SamplingMask measure(const Image<double>& truth, const SamplingMask& mask);

// length-N membership table of omega
std::vector<char> omega_membership(const SamplingMask& mask);

}  // namespace tvcs
