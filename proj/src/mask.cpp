#include "tvcs/mask.hpp"

#include <algorithm>
#include <cmath>

#include "tvcs/fft.hpp"

namespace tvcs {

index_t SamplingMask::find(index_t l) const {
  auto it = std::lower_bound(omega.begin(), omega.end(), l);
  if (it == omega.end() || *it != l) return -1;
  return it - omega.begin();
}

SamplingMask sample_mask(const GridShape& shape, double fraction, std::uint64_t seed,
                         bool symmetrize) {
  if (!(fraction > 0.0) || fraction > 1.0)
    throw std::invalid_argument("sample_mask: fraction must lie in (0, 1]");
  const index_t nn = shape.size();
  index_t target = static_cast<index_t>(std::ceil(fraction * double(nn)));
  if (target < 1) throw std::invalid_argument("sample_mask: fraction admits no indices");
  if (target > nn) target = nn;

  SamplingMask m;
  m.shape = shape;
  m.fraction = fraction;
  m.seed = seed;
  m.symmetric = symmetrize;
  Rng rng(seed);

  if (symmetrize) {
    // orbit = {l, -l}; the zero orbit is mandatory and goes first
    std::vector<index_t> reps;
    reps.reserve(static_cast<std::size_t>(nn / 2 + 4));
    for (index_t l = 1; l < nn; ++l)
      if (l <= shape.negate(l)) reps.push_back(l);
    rng.shuffle(reps);
    m.omega.push_back(0);
    index_t count = 1;
    for (index_t rep : reps) {
      if (count >= target) break;
      index_t neg = shape.negate(rep);
      m.omega.push_back(rep);
      ++count;
      if (neg != rep) {
        m.omega.push_back(neg);
        ++count;
      }
    }
  } else {
    std::vector<index_t> all;
    all.reserve(static_cast<std::size_t>(nn - 1));
    for (index_t l = 1; l < nn; ++l) all.push_back(l);
    rng.shuffle(all);
    m.omega.push_back(0);
    for (index_t l : all) {
      if (static_cast<index_t>(m.omega.size()) >= target) break;
      m.omega.push_back(l);
    }
  }
  std::sort(m.omega.begin(), m.omega.end());
  return m;
}

SamplingMask measure(const Image<double>& truth, const SamplingMask& mask) {
  if (truth.shape != mask.shape) throw std::invalid_argument("measure: shape mismatch");
  SamplingMask out = mask;
  UnitaryDft<double> dft(mask.shape);
  auto f = dft.forward(truth);
  out.b.resize(out.omega.size());
  for (std::size_t i = 0; i < out.omega.size(); ++i) out.b[i] = f[out.omega[i]];
  if (out.symmetric) {
    // exact conjugate symmetry: copy one representative of each pair
    for (std::size_t i = 0; i < out.omega.size(); ++i) {
      index_t l = out.omega[i];
      index_t neg = mask.shape.negate(l);
      if (neg == l) {
        out.b[i] = std::complex<double>(out.b[i].real(), 0.0);
      } else if (l < neg) {
        index_t j = out.find(neg);
        if (j >= 0) out.b[j] = std::conj(out.b[i]);
      }
    }
  }
  return out;
}

std::vector<char> omega_membership(const SamplingMask& mask) {
  std::vector<char> on(static_cast<std::size_t>(mask.shape.size()), 0);
  for (index_t l : mask.omega) {
    if (l < 0 || l >= mask.shape.size())
      throw std::invalid_argument("mask index out of range");
    on[static_cast<std::size_t>(l)] = 1;
  }
  return on;
}

}  // namespace tvcs
