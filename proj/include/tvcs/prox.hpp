#pragma once
// Blockwise proximal operators for the group-sparse norm sum_j ||q_j||_2, the
// projection onto gradients of measurement-feasible images, reflections, and
// the quadratically regularized variant.
//
// A "block" is the d-vector a field carries at one spatial index.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "tvcs/grid.hpp"
#include "tvcs/mask.hpp"
#include "tvcs/spectral.hpp"
#include "tvcs/support.hpp"

namespace tvcs {

template <class Real>
inline double block_norm(const VectorField<Real>& q, index_t j) {
  double s = 0;
  for (int i = 0; i < q.shape.d; ++i) {
    double x = q.c[i][static_cast<std::size_t>(j)];
    s += x * x;
  }
  return std::sqrt(s);
}

// sum_j ||(K u)_j||_2
template <class Real>
double tv_norm(const Image<Real>& u) {
  auto g = gradient(u);
  double s = 0;
  for (index_t j = 0; j < u.shape.size(); ++j) s += block_norm(g, j);
  return s;
}

template <class Real>
double tv_norm_field(const VectorField<Real>& q) {
  double s = 0;
  for (index_t j = 0; j < q.shape.size(); ++j) s += block_norm(q, j);
  return s;
}

// blockwise soft threshold: 0 if ||q_j|| <= tau, else q_j (1 - tau/||q_j||)
template <class Real>
VectorField<Real> shrink(const VectorField<Real>& q, Real tau) {
  if (!(tau > 0)) throw std::invalid_argument("shrink: tau must be positive");
  VectorField<Real> out(q.shape);
  const int d = q.shape.d;
  for (index_t j = 0; j < q.shape.size(); ++j) {
    double n = block_norm(q, j);
    if (n > double(tau)) {
      Real f = Real(1) - Real(double(tau) / n);
      for (int i = 0; i < d; ++i) out.c[i][j] = q.c[i][j] * f;
    }
  }
  return out;
}

// q_j / ||q_j|| on nonzero blocks, 0 on exact-zero blocks
template <class Real>
VectorField<Real> normal_field(const VectorField<Real>& q) {
  VectorField<Real> out(q.shape);
  const int d = q.shape.d;
  for (index_t j = 0; j < q.shape.size(); ++j) {
    double n = block_norm(q, j);
    if (n > 0) {
      for (int i = 0; i < d; ++i) out.c[i][j] = Real(double(q.c[i][j]) / n);
    }
  }
  return out;
}

// blockwise projection onto the unit ball of the max block norm
template <class Real>
VectorField<Real> ball_project(const VectorField<Real>& q) {
  VectorField<Real> out(q.shape);
  const int d = q.shape.d;
  for (index_t j = 0; j < q.shape.size(); ++j) {
    double n = block_norm(q, j);
    double f = (n > 1.0) ? 1.0 / n : 1.0;
    for (int i = 0; i < d; ++i) out.c[i][j] = Real(double(q.c[i][j]) * f);
  }
  return out;
}

// Shrinkage in factored form: zero blocks deleted, support blocks moved one
// tau along their unit direction.  Requires ||q_j|| <= tau exactly off-support
// and > tau on-support; a violation means q left the cell the support was
// detected on and is reported.
template <class Real>
VectorField<Real> shrink_factored(const VectorField<Real>& q, Real tau, const SupportSet& supp) {
  if (supp.on.size() != static_cast<std::size_t>(q.shape.size()))
    throw std::invalid_argument("shrink_factored: support size mismatch");
  VectorField<Real> out(q.shape);
  const int d = q.shape.d;
  for (index_t j = 0; j < q.shape.size(); ++j) {
    double n = block_norm(q, j);
    if (supp.on[static_cast<std::size_t>(j)]) {
      if (!(n > double(tau)))
        throw numerical_error("shrink_factored: on-support block norm <= tau (left the support cell)");
      Real f = Real(1) - Real(double(tau) / n);
      for (int i = 0; i < d; ++i) out.c[i][j] = q.c[i][j] * f;
    } else {
      if (n > double(tau))
        throw numerical_error("shrink_factored: off-support block norm > tau (left the support cell)");
      // block removed by the zero-set selector
    }
  }
  return out;
}

// prox with step tau of ||.||_{1,2} + (1/(2*alpha))||.||^2:
// shrink(alpha q/(alpha+tau), alpha tau/(alpha+tau))
template <class Real>
VectorField<Real> prox_f_regularized(const VectorField<Real>& q, Real tau, Real alpha) {
  if (!(tau > 0) || !(alpha > 0))
    throw std::invalid_argument("prox_f_regularized: tau and alpha must be positive");
  Real scale = alpha / (alpha + tau);
  VectorField<Real> scaled(q.shape);
  for (int i = 0; i < q.shape.d; ++i)
    for (std::size_t j = 0; j < q.c[i].size(); ++j) scaled.c[i][j] = q.c[i][j] * scale;
  return shrink(scaled, scale * tau);
}

// 2 * prox_out - q
template <class Real>
VectorField<Real> reflect_from(const VectorField<Real>& prox_out, const VectorField<Real>& q) {
  VectorField<Real> out(q.shape);
  for (int i = 0; i < q.shape.d; ++i)
    for (std::size_t j = 0; j < q.c[i].size(); ++j)
      out.c[i][j] = Real(2) * prox_out.c[i][j] - q.c[i][j];
  return out;
}

template <class Real>
VectorField<Real> reflect(const std::function<VectorField<Real>(const VectorField<Real>&)>& prox,
                          const VectorField<Real>& q) {
  return reflect_from(prox(q), q);
}

// Projection onto { K u : u real, (dft u)|_omega = b } and the associated
// image recovery.  Per frequency l the range of the stacked difference
// operators is the complex line through (lambda^0_l, ..., lambda^{d-1}_l);
// on omega the coefficient is pinned to b_l, off omega it is the least-squares
// coefficient <lambda, qhat> / sum_i |lambda^i|^2.  The denominator vanishes
// only at the zero frequency, which omega must contain.
template <class Real>
class GradientDataProjector {
 public:
  GradientDataProjector(const SpectralOperator<Real>& spec, const SamplingMask& mask)
      : spec_(&spec), mask_(&mask) {
    if (mask.shape != spec.shape)
      throw std::invalid_argument("projector: mask/spectral shape mismatch");
    const index_t nn = spec.shape.size();
    on_ = omega_membership(mask);
    if (!on_[0]) throw numerical_error("projector: zero frequency missing from the mask");
    if (mask.b.size() != mask.omega.size())
      throw std::invalid_argument("projector: mask has no measured data");
    hermitian_ = mask.symmetric;
    if (hermitian_) validate_hermitian();

    bhat_.assign(static_cast<std::size_t>(nn), std::complex<Real>(0, 0));
    for (std::size_t i = 0; i < mask.omega.size(); ++i)
      bhat_[static_cast<std::size_t>(mask.omega[i])] =
          std::complex<Real>(Real(mask.b[i].real()), Real(mask.b[i].imag()));
    pinv_.assign(static_cast<std::size_t>(nn), Real(0));
    for (index_t l = 1; l < nn; ++l) pinv_[l] = Real(1) / spec.denom[l];
    for (int i = 0; i < spec.shape.d; ++i) {
      target_[i].assign(static_cast<std::size_t>(nn), std::complex<Real>(0, 0));
      for (index_t l : mask.omega) target_[i][l] = spec.lam[i][l] * bhat_[l];
    }
  }

  const SpectralOperator<Real>& spectral() const { return *spec_; }
  const SamplingMask& mask() const { return *mask_; }
  const std::vector<char>& on_omega() const { return on_; }
  const std::vector<std::complex<Real>>& b_embedded() const { return bhat_; }
  bool hermitian() const { return hermitian_; }
  Real imag_guard() const { return hermitian_ ? default_imag_guard<Real>() : Real(-1); }

  VectorField<Real> apply(const VectorField<Real>& q) const {
    VectorField<Real> out(q.shape);
    apply_full(q, out, nullptr, nullptr);
    return out;
  }

  // out = projection of q; optionally also the recovered image (pinned
  // spectrum and its real inverse transform).
  void apply_full(const VectorField<Real>& q, VectorField<Real>& out,
                  std::vector<std::complex<Real>>* uhat_out, Image<Real>* u_out) const {
    const GridShape& s = spec_->shape;
    if (q.shape != s) throw std::invalid_argument("projector: field shape mismatch");
    const int d = s.d;
    const index_t nn = s.size();
    std::array<std::vector<std::complex<Real>>, 3> fhat;
    for (int i = 0; i < d; ++i) fhat[i] = spec_->dft.forward_real(q.c[i]);
    if (uhat_out) uhat_out->assign(static_cast<std::size_t>(nn), std::complex<Real>(0, 0));
    for (index_t l = 0; l < nn; ++l) {
      if (on_[l]) {
        for (int i = 0; i < d; ++i) fhat[i][l] = target_[i][l];
        if (uhat_out) (*uhat_out)[l] = bhat_[l];
      } else {
        // widened accumulator; d <= 3 but f32 runs still benefit
        std::complex<double> acc(0, 0);
        for (int i = 0; i < d; ++i)
          acc += std::conj(std::complex<double>(spec_->lam[i][l])) * std::complex<double>(fhat[i][l]);
        std::complex<double> coef = acc * double(pinv_[l]);
        for (int i = 0; i < d; ++i) {
          std::complex<double> v = std::complex<double>(spec_->lam[i][l]) * coef;
          fhat[i][l] = std::complex<Real>(Real(v.real()), Real(v.imag()));
        }
        if (uhat_out) (*uhat_out)[l] = std::complex<Real>(Real(coef.real()), Real(coef.imag()));
      }
    }
    Real guard = imag_guard();
    for (int i = 0; i < d; ++i) {
      Image<Real> gi = spec_->dft.inverse_real(fhat[i], guard);
      out.c[i] = std::move(gi.v);
    }
    if (u_out && uhat_out) *u_out = spec_->dft.inverse_real(*uhat_out, guard);
  }

  // Image whose gradient is the projection (unique given the pinned data).
  void recover_image(const VectorField<Real>& q, std::vector<std::complex<Real>>& uhat,
                     Image<Real>& u) const {
    VectorField<Real> tmp(q.shape);
    apply_full(q, tmp, &uhat, &u);
  }

  // In-place frequency step: uhat = b on omega, uhat -= tau*<lambda,what>/denom off.
  void pinned_frequency_update(std::vector<std::complex<Real>>& uhat,
                               const std::array<std::vector<std::complex<Real>>, 3>& what,
                               Real tau) const {
    const GridShape& s = spec_->shape;
    const int d = s.d;
    const index_t nn = s.size();
    for (index_t l = 0; l < nn; ++l) {
      if (on_[l]) {
        uhat[l] = bhat_[l];
      } else {
        std::complex<double> acc(0, 0);
        for (int i = 0; i < d; ++i)
          acc += std::conj(std::complex<double>(spec_->lam[i][l])) * std::complex<double>(what[i][l]);
        std::complex<double> v = std::complex<double>(uhat[l]) - double(tau) * acc * double(pinv_[l]);
        uhat[l] = std::complex<Real>(Real(v.real()), Real(v.imag()));
      }
    }
  }

 private:
  void validate_hermitian() const {
    const SamplingMask& m = *mask_;
    double scale = 1.0;
    for (auto& z : m.b) scale = std::max(scale, std::abs(z));
    for (std::size_t i = 0; i < m.omega.size(); ++i) {
      index_t l = m.omega[i];
      index_t neg = m.shape.negate(l);
      index_t j = m.find(neg);
      if (j < 0)
        throw numerical_error("projector: mask marked symmetric but a conjugate index is absent");
      if (std::abs(m.b[static_cast<std::size_t>(j)] - std::conj(m.b[i])) > 1e-10 * scale)
        throw numerical_error("projector: measured data violates conjugate symmetry");
    }
  }

  const SpectralOperator<Real>* spec_;
  const SamplingMask* mask_;
  std::vector<char> on_;
  std::array<std::vector<std::complex<Real>>, 3> target_;  // lambda^i b on omega
  std::vector<Real> pinv_;                                 // 1/denom, 0 at frequency 0
  std::vector<std::complex<Real>> bhat_;                   // b embedded at length N
  bool hermitian_ = true;
};

// prox_h as a one-shot call
template <class Real>
VectorField<Real> prox_h(const VectorField<Real>& q, const SpectralOperator<Real>& spec,
                         const SamplingMask& mask) {
  GradientDataProjector<Real> proj(spec, mask);
  return proj.apply(q);
}

}  // namespace tvcs
