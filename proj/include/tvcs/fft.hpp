#pragma once
// Unitary DFT over a GridShape, double and float paths.
//
// Convention (fixed project-wide): forward transform has kernel
// (1/sqrt(N)) * exp(-2*pi*i*<l,j>/n) per axis, inverse is its conjugate
// transpose; both directions carry the 1/sqrt(N) factor, so the transform is
// unitary.  Flat frequency index 0 is the zero frequency.
//
// Backed by FFTW (fftw3 / fftw3f).  Plan creation is serialized behind a
// global mutex and uses FFTW_ESTIMATE so planning is deterministic; execution
// uses the new-array interface and is safe to call concurrently on distinct
// buffers.

#include <fftw3.h>

#include <complex>
#include <mutex>
#include <vector>

#include "tvcs/grid.hpp"

namespace tvcs {

namespace detail {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

template <class Real>
struct FftwApi;

template <>
struct FftwApi<double> {
  using complex = fftw_complex;
  using plan = fftw_plan;
  static plan plan_dft(int rank, const int* n, complex* in, complex* out, int sign) {
    return fftw_plan_dft(rank, n, in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  static void execute_dft(plan p, complex* in, complex* out) { fftw_execute_dft(p, in, out); }
  static void destroy(plan p) { fftw_destroy_plan(p); }
};

template <>
struct FftwApi<float> {
  using complex = fftwf_complex;
  using plan = fftwf_plan;
  static plan plan_dft(int rank, const int* n, complex* in, complex* out, int sign) {
    return fftwf_plan_dft(rank, n, in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  static void execute_dft(plan p, complex* in, complex* out) { fftwf_execute_dft(p, in, out); }
  static void destroy(plan p) { fftwf_destroy_plan(p); }
};

}  // namespace detail

// Relative imaginary-residual bound used when discarding the imaginary part.
template <class Real>
constexpr Real default_imag_guard();
template <>
constexpr double default_imag_guard<double>() { return 1e-8; }
template <>
constexpr float default_imag_guard<float>() { return 1e-4f; }

template <class Real>
class UnitaryDft {
  using Api = detail::FftwApi<Real>;
  using NativeComplex = typename Api::complex;

 public:
  explicit UnitaryDft(const GridShape& s)
      : shape_(s), scale_(Real(1) / std::sqrt(Real(s.size()))) {
    // FFTW expects extents slowest-first; our axis 0 is fastest.
    int rank = s.d;
    std::array<int, 3> rev{};
    for (int i = 0; i < rank; ++i) rev[i] = s.n[rank - 1 - i];
    std::vector<std::complex<Real>> a(static_cast<std::size_t>(s.size()));
    std::vector<std::complex<Real>> b(static_cast<std::size_t>(s.size()));
    std::lock_guard<std::mutex> lk(detail::fftw_planner_mutex());
    fwd_ = Api::plan_dft(rank, rev.data(), cast(a.data()), cast(b.data()), FFTW_FORWARD);
    bwd_ = Api::plan_dft(rank, rev.data(), cast(a.data()), cast(b.data()), FFTW_BACKWARD);
  }

  ~UnitaryDft() {
    if (fwd_ || bwd_) {
      std::lock_guard<std::mutex> lk(detail::fftw_planner_mutex());
      if (fwd_) Api::destroy(fwd_);
      if (bwd_) Api::destroy(bwd_);
    }
  }

  UnitaryDft(const UnitaryDft&) = delete;
  UnitaryDft& operator=(const UnitaryDft&) = delete;
  UnitaryDft(UnitaryDft&& o) noexcept
      : shape_(o.shape_), scale_(o.scale_), fwd_(o.fwd_), bwd_(o.bwd_) {
    o.fwd_ = nullptr;
    o.bwd_ = nullptr;
  }

  const GridShape& shape() const { return shape_; }

  void forward(const std::complex<Real>* in, std::complex<Real>* out) const {
    execute(fwd_, in, out);
  }

  void inverse(const std::complex<Real>* in, std::complex<Real>* out) const {
    execute(bwd_, in, out);
  }

  std::vector<std::complex<Real>> forward(const Image<Real>& u) const {
    if (u.shape != shape_) throw std::invalid_argument("dft: shape mismatch");
    std::vector<std::complex<Real>> in(u.v.begin(), u.v.end());
    std::vector<std::complex<Real>> out(in.size());
    forward(in.data(), out.data());
    return out;
  }

  std::vector<std::complex<Real>> forward_real(const std::vector<Real>& v) const {
    std::vector<std::complex<Real>> in(v.begin(), v.end());
    std::vector<std::complex<Real>> out(in.size());
    forward(in.data(), out.data());
    return out;
  }

  // Inverse transform of a (conjugate-symmetric) spectrum; discards the
  // imaginary part after asserting |imag| <= guard_rel * |input|.
  // guard_rel < 0 disables the check (unsymmetrized-mask escape hatch).
  Image<Real> inverse_real(const std::vector<std::complex<Real>>& f, Real guard_rel) const {
    if (static_cast<index_t>(f.size()) != shape_.size())
      throw std::invalid_argument("idft: length mismatch");
    std::vector<std::complex<Real>> out(f.size());
    inverse(f.data(), out.data());
    Image<Real> u(shape_);
    double imag2 = 0, in2 = 0;
    for (std::size_t j = 0; j < out.size(); ++j) {
      u.v[j] = out[j].real();
      imag2 += double(out[j].imag()) * double(out[j].imag());
      in2 += std::norm(std::complex<double>(f[j]));
    }
    if (guard_rel >= 0 && imag2 > double(guard_rel) * double(guard_rel) * in2)
      throw numerical_error("idft: imaginary residual exceeds guard (spectrum not conjugate-symmetric)");
    return u;
  }

  Image<Real> inverse_real(const std::vector<std::complex<Real>>& f) const {
    return inverse_real(f, default_imag_guard<Real>());
  }

 private:
  static NativeComplex* cast(std::complex<Real>* p) {
    return reinterpret_cast<NativeComplex*>(p);
  }

  void execute(typename Api::plan p, const std::complex<Real>* in, std::complex<Real>* out) const {
    index_t nn = shape_.size();
    if (in == out) {
      std::vector<std::complex<Real>> tmp(in, in + nn);
      Api::execute_dft(p, cast(tmp.data()), cast(out));
    } else {
      // out-of-place c2c execution leaves the input intact
      Api::execute_dft(p, cast(const_cast<std::complex<Real>*>(in)), cast(out));
    }
    for (index_t j = 0; j < nn; ++j) out[j] *= scale_;
  }

  GridShape shape_;
  Real scale_;
  typename Api::plan fwd_ = nullptr;
  typename Api::plan bwd_ = nullptr;
};

}  // namespace tvcs
