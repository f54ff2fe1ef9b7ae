#pragma once
// Iteration engines for the three equivalent constrained-TV solvers: ADMM,
// Douglas-Rachford splitting on the dual auxiliary variable (with optional
// relaxation lambda and quadratic regularization alpha), and the explicit
// frequency-space primal-dual form.  Plus the state translators that map any
// synchronized trajectory between the three parameterizations, and a run()
// driver with convergence logging.
//
// Step coupling: gamma = sigma = 1/tau throughout.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "tvcs/grid.hpp"
#include "tvcs/prox.hpp"
#include "tvcs/spectral.hpp"
#include "tvcs/util.hpp"

namespace tvcs {

enum class Method { admm, drs, pdhg };
enum class Precision { f32, f64 };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::admm: return "admm";
    case Method::drs: return "drs";
    case Method::pdhg: return "pdhg";
  }
  return "?";
}

inline const char* precision_name(Precision p) {
  return p == Precision::f32 ? "f32" : "f64";
}

struct SolverConfig {
  Method method = Method::pdhg;
  double tau = 0.01;            // primal step; gamma = sigma = 1/tau
  double lambda = 1.0;          // relaxation, drs only
  std::optional<double> alpha;  // quadratic regularization weight, drs only
  std::int64_t max_iters = 1000;
  double tol = 1e-12;           // on ||q_k - q_{k-1}|| / ||q_k||
  std::int64_t log_every = 1;
  Precision precision = Precision::f64;

  double gamma() const { return 1.0 / tau; }

  void validate() const {
    if (!(tau > 0) || !std::isfinite(tau))
      throw std::invalid_argument("config: tau must be positive and finite");
    if (!(lambda > 0) || !(lambda < 2))
      throw std::invalid_argument("config: lambda must lie in (0, 2)");
    if (alpha && !(*alpha > 0))
      throw std::invalid_argument("config: alpha must be positive");
    if (max_iters < 0) throw std::invalid_argument("config: max_iters must be >= 0");
    if (!(tol >= 0)) throw std::invalid_argument("config: tol must be >= 0");
    if (log_every < 1) throw std::invalid_argument("config: log_every must be >= 1");
    if (method != Method::drs && (lambda != 1.0 || alpha))
      throw std::invalid_argument("config: lambda != 1 and alpha require the drs engine");
  }
};

// All three states cache the primal image and its pinned spectrum from the
// most recent data projection; the caches feed logging and translation and
// are not consumed by the iterations themselves.

template <class Real>
struct AdmmState {
  Image<Real> x;
  VectorField<Real> kx;  // gradient of x, output of the constraint projection
  VectorField<Real> y;
  VectorField<Real> z;   // scaled dual
  std::vector<std::complex<Real>> xhat;
  std::int64_t k = 0;
};

template <class Real>
struct PdhgState {
  Image<Real> u;
  std::vector<std::complex<Real>> uhat;
  VectorField<Real> v;
  VectorField<Real> w;  // extragradient
  std::int64_t k = 0;
};

template <class Real>
struct DrsState {
  VectorField<Real> q;
  VectorField<Real> v;       // prox_f (regularized when alpha is set) of q
  VectorField<Real> prev_q;  // one-step history for translation; translators
  VectorField<Real> prev_v;  // only ever consume prev_q - prev_v
  bool prev_valid = false;
  Image<Real> u;             // primal image from the last data projection
  std::vector<std::complex<Real>> uhat;
  std::int64_t k = 0;
};

namespace detail {

inline void ensure_finite(double x, const char* what) {
  if (!std::isfinite(x))
    throw numerical_error(std::string("non-finite value in ") + what);
}

template <class Real>
VectorField<Real> prox_f_cfg(const SolverConfig& cfg, const VectorField<Real>& q) {
  if (cfg.alpha) return prox_f_regularized(q, Real(cfg.tau), Real(*cfg.alpha));
  return shrink(q, Real(cfg.tau));
}

}  // namespace detail

// ---- initialization -------------------------------------------------------

// Zero-filled inverse transform of the measured data, the default start when
// no ground truth is available.
template <class Real>
Image<Real> zero_fill_image(const GradientDataProjector<Real>& proj) {
  return proj.spectral().dft.inverse_real(proj.b_embedded(), proj.imag_guard());
}

template <class Real>
AdmmState<Real> init_admm(const GradientDataProjector<Real>& proj, const Image<Real>* u0 = nullptr) {
  AdmmState<Real> st;
  st.x = u0 ? *u0 : zero_fill_image(proj);
  if (st.x.shape != proj.spectral().shape)
    throw std::invalid_argument("init: starting image shape mismatch");
  st.kx = gradient(st.x);
  st.xhat = proj.spectral().dft.forward(st.x);
  st.y = st.kx;
  st.z = VectorField<Real>(st.x.shape);
  return st;
}

template <class Real>
PdhgState<Real> init_pdhg(const GradientDataProjector<Real>& proj, const Image<Real>* u0 = nullptr) {
  PdhgState<Real> st;
  st.u = u0 ? *u0 : zero_fill_image(proj);
  if (st.u.shape != proj.spectral().shape)
    throw std::invalid_argument("init: starting image shape mismatch");
  st.uhat = proj.spectral().dft.forward(st.u);
  st.v = VectorField<Real>(st.u.shape);
  st.w = VectorField<Real>(st.u.shape);
  return st;
}

template <class Real>
DrsState<Real> init_drs(const GradientDataProjector<Real>& proj, const SolverConfig& cfg,
                        const Image<Real>* u0 = nullptr) {
  DrsState<Real> st;
  st.u = u0 ? *u0 : zero_fill_image(proj);
  if (st.u.shape != proj.spectral().shape)
    throw std::invalid_argument("init: starting image shape mismatch");
  st.uhat = proj.spectral().dft.forward(st.u);
  st.q = gradient(st.u);
  st.v = detail::prox_f_cfg(cfg, st.q);
  return st;
}

// ---- single iterations ----------------------------------------------------

// line 1: Kx = projection of y - tau z onto gradients of feasible images
// line 2: y  = shrink(Kx + tau z, tau)
// line 3: z += (Kx - y)/tau
template <class Real>
void admm_step(AdmmState<Real>& st, const GradientDataProjector<Real>& proj,
               const SolverConfig& cfg) {
  const Real tau = Real(cfg.tau);
  VectorField<Real> qin(st.y.shape);
  axpy(qin, st.y, -tau, st.z);
  proj.apply_full(qin, st.kx, &st.xhat, &st.x);
  VectorField<Real> sin_(st.y.shape);
  axpy(sin_, st.kx, tau, st.z);
  VectorField<Real> ynew = shrink(sin_, tau);
  for (int i = 0; i < st.y.shape.d; ++i)
    for (std::size_t j = 0; j < st.y.c[i].size(); ++j)
      st.z.c[i][j] += (st.kx.c[i][j] - ynew.c[i][j]) / tau;
  st.y = std::move(ynew);
  ++st.k;
  detail::ensure_finite(norm2(st.y) + norm2(st.z), "admm state");
}

// line 1: uhat = b on omega, uhat -= tau <lambda, what>/denom off omega
// line 2: v = ball projection of v + (1/tau) K u
// line 3: w = 2 v_new - v
template <class Real>
void pdhg_step(PdhgState<Real>& st, const GradientDataProjector<Real>& proj,
               const SolverConfig& cfg) {
  const Real tau = Real(cfg.tau);
  const auto& spec = proj.spectral();
  std::array<std::vector<std::complex<Real>>, 3> what;
  for (int i = 0; i < st.u.shape.d; ++i) what[i] = spec.dft.forward_real(st.w.c[i]);
  proj.pinned_frequency_update(st.uhat, what, tau);
  st.u = spec.dft.inverse_real(st.uhat, proj.imag_guard());
  VectorField<Real> g = gradient(st.u);
  VectorField<Real> vin(st.u.shape);
  const Real sigma = Real(1) / tau;
  for (int i = 0; i < st.u.shape.d; ++i)
    for (std::size_t j = 0; j < g.c[i].size(); ++j)
      vin.c[i][j] = st.v.c[i][j] + sigma * g.c[i][j];
  VectorField<Real> vnew = ball_project(vin);
  for (int i = 0; i < st.u.shape.d; ++i)
    for (std::size_t j = 0; j < vnew.c[i].size(); ++j)
      st.w.c[i][j] = Real(2) * vnew.c[i][j] - st.v.c[i][j];
  st.v = std::move(vnew);
  ++st.k;
  detail::ensure_finite(norm2(st.u) + norm2(st.v), "pdhg state");
}

// q_{k+1} = (1-lambda) q_k + lambda [prox_h(2 v_k - q_k) + q_k - v_k],
// v always kept equal to prox_f of q.  lambda = 1 takes the direct branch so
// relaxation never perturbs the base arithmetic.
template <class Real>
void drs_step(DrsState<Real>& st, const GradientDataProjector<Real>& proj,
              const SolverConfig& cfg) {
  st.prev_q = st.q;
  st.prev_v = st.v;
  st.prev_valid = true;
  VectorField<Real> refl = reflect_from(st.v, st.q);
  VectorField<Real> kx(st.q.shape);
  proj.apply_full(refl, kx, &st.uhat, &st.u);
  const Real lam = Real(cfg.lambda);
  if (cfg.lambda == 1.0) {
    for (int i = 0; i < st.q.shape.d; ++i)
      for (std::size_t j = 0; j < st.q.c[i].size(); ++j)
        st.q.c[i][j] = kx.c[i][j] + (st.q.c[i][j] - st.v.c[i][j]);
  } else {
    for (int i = 0; i < st.q.shape.d; ++i)
      for (std::size_t j = 0; j < st.q.c[i].size(); ++j)
        st.q.c[i][j] += lam * (kx.c[i][j] - st.v.c[i][j]);
  }
  st.v = detail::prox_f_cfg(cfg, st.q);
  ++st.k;
  detail::ensure_finite(norm2(st.q), "drs state");
}

// ---- state translators ----------------------------------------------------
// Correspondence for synchronized iterates (lambda = 1, no alpha):
//   primal        K x_k = q_k - (q_{k-1} - v_{k-1})
//   dual          z_k   = (q_k - v_k)/tau,  v_k(drs) = y_k
//   extragradient w_k   = K x_k / tau + z_k - y_k / tau
// Translations into DrsState normalize the history pair to prev_v = v,
// prev_q = v + (recovered difference), which preserves every Table-consumed
// quantity.

template <class Real>
DrsState<Real> drs_from_admm(const AdmmState<Real>& st, double tau) {
  DrsState<Real> out;
  out.q = VectorField<Real>(st.y.shape);
  axpy(out.q, st.y, Real(tau), st.z);
  out.v = st.y;
  out.prev_v = out.v;
  out.prev_q = VectorField<Real>(st.y.shape);
  for (int i = 0; i < st.y.shape.d; ++i)
    for (std::size_t j = 0; j < st.y.c[i].size(); ++j)
      out.prev_q.c[i][j] = out.prev_v.c[i][j] + (out.q.c[i][j] - st.kx.c[i][j]);
  out.prev_valid = true;
  out.u = st.x;
  out.uhat = st.xhat;
  out.k = st.k;
  return out;
}

template <class Real>
AdmmState<Real> admm_from_drs(const DrsState<Real>& st, const GradientDataProjector<Real>& proj,
                              double tau) {
  if (!st.prev_valid)
    throw std::invalid_argument("translate: drs state carries no history pair");
  AdmmState<Real> out;
  VectorField<Real> kx(st.q.shape);
  for (int i = 0; i < st.q.shape.d; ++i)
    for (std::size_t j = 0; j < st.q.c[i].size(); ++j)
      kx.c[i][j] = st.q.c[i][j] - (st.prev_q.c[i][j] - st.prev_v.c[i][j]);
  out.kx = VectorField<Real>(st.q.shape);
  proj.apply_full(kx, out.kx, &out.xhat, &out.x);
  out.y = st.v;
  out.z = VectorField<Real>(st.q.shape);
  for (int i = 0; i < st.q.shape.d; ++i)
    for (std::size_t j = 0; j < st.q.c[i].size(); ++j)
      out.z.c[i][j] = (st.q.c[i][j] - st.v.c[i][j]) / Real(tau);
  out.k = st.k;
  return out;
}

template <class Real>
PdhgState<Real> pdhg_from_admm(const AdmmState<Real>& st, double tau) {
  PdhgState<Real> out;
  out.u = st.x;
  out.uhat = st.xhat;
  out.v = st.z;
  out.w = VectorField<Real>(st.y.shape);
  for (int i = 0; i < st.y.shape.d; ++i)
    for (std::size_t j = 0; j < st.y.c[i].size(); ++j)
      out.w.c[i][j] = (st.kx.c[i][j] - st.y.c[i][j]) / Real(tau) + st.z.c[i][j];
  out.k = st.k;
  return out;
}

template <class Real>
AdmmState<Real> admm_from_pdhg(const PdhgState<Real>& st, double tau) {
  AdmmState<Real> out;
  out.x = st.u;
  out.xhat = st.uhat;
  out.kx = gradient(st.u);
  out.z = st.v;
  out.y = VectorField<Real>(st.u.shape);
  for (int i = 0; i < st.u.shape.d; ++i)
    for (std::size_t j = 0; j < st.v.c[i].size(); ++j)
      out.y.c[i][j] = out.kx.c[i][j] + Real(tau) * (st.v.c[i][j] - st.w.c[i][j]);
  out.k = st.k;
  return out;
}

template <class Real>
DrsState<Real> drs_from_pdhg(const PdhgState<Real>& st, double tau) {
  return drs_from_admm(admm_from_pdhg(st, tau), tau);
}

template <class Real>
PdhgState<Real> pdhg_from_drs(const DrsState<Real>& st, const GradientDataProjector<Real>& proj,
                              double tau) {
  return pdhg_from_admm(admm_from_drs(st, proj, tau), tau);
}

// ---- convergence logging and the run driver -------------------------------

struct LogRow {
  std::int64_t iter = 0;
  double rel_err = std::numeric_limits<double>::quiet_NaN();  // vs reference image
  double q_dist = std::numeric_limits<double>::quiet_NaN();   // vs converged q*
  double tv = 0;
  double residual = 0;  // observed-frequency mismatch of the pinned spectrum
  double seconds = 0;
};

struct ConvergenceLog {
  std::vector<LogRow> rows;
};

// Optional references resolved in f64 regardless of run precision, plus a
// per-row sink so callers can persist logs append-only while iterating.
struct RunRefs {
  const Image<double>* u_ref = nullptr;
  const VectorField<double>* q_ref = nullptr;
  std::function<void(const LogRow&)> on_row;
};

template <class Real>
struct RunResult {
  Method method = Method::pdhg;
  std::variant<AdmmState<Real>, DrsState<Real>, PdhgState<Real>> state;
  ConvergenceLog log;
  std::int64_t iters = 0;
  bool converged = false;
};

namespace detail {

template <class Real>
double rel_err_vs(const Image<Real>& u, const Image<double>* ref) {
  if (!ref) return std::numeric_limits<double>::quiet_NaN();
  double num = 0, den = 0;
  for (std::size_t j = 0; j < u.v.size(); ++j) {
    double t = double(u.v[j]) - ref->v[j];
    num += t * t;
    den += ref->v[j] * ref->v[j];
  }
  return std::sqrt(num) / std::sqrt(den);
}

template <class Real>
double dist_vs(const VectorField<Real>& q, const VectorField<double>* ref) {
  if (!ref) return std::numeric_limits<double>::quiet_NaN();
  double s = 0;
  for (int i = 0; i < q.shape.d; ++i)
    for (std::size_t j = 0; j < q.c[i].size(); ++j) {
      double t = double(q.c[i][j]) - ref->c[i][j];
      s += t * t;
    }
  return std::sqrt(s);
}

template <class Real>
double omega_residual(const std::vector<std::complex<Real>>& uhat,
                      const GradientDataProjector<Real>& proj) {
  double s = 0;
  const auto& b = proj.b_embedded();
  for (index_t l : proj.mask().omega) {
    std::complex<double> d = std::complex<double>(uhat[l]) - std::complex<double>(b[l]);
    s += std::norm(d);
  }
  return std::sqrt(s);
}

// DRS-equivalent auxiliary variable of the current state, the quantity the
// stopping rule watches.
template <class Real>
VectorField<Real> equivalent_q(const AdmmState<Real>& st, double tau) {
  VectorField<Real> q(st.y.shape);
  axpy(q, st.y, Real(tau), st.z);
  return q;
}
template <class Real>
VectorField<Real> equivalent_q(const DrsState<Real>& st, double) {
  return st.q;
}
template <class Real>
VectorField<Real> equivalent_q(const PdhgState<Real>& st, double tau) {
  VectorField<Real> q = gradient(st.u);
  for (int i = 0; i < q.shape.d; ++i)
    for (std::size_t j = 0; j < q.c[i].size(); ++j)
      q.c[i][j] += Real(tau) * (Real(2) * st.v.c[i][j] - st.w.c[i][j]);
  return q;
}

}  // namespace detail

// Iterates cfg.method until max_iters or the relative q change drops to tol.
// The log records iteration 0 (the initial state) and then every
// cfg.log_every-th iteration plus the final one.
template <class Real, class State>
RunResult<Real> run_from(State st, const GradientDataProjector<Real>& proj,
                         const SolverConfig& cfg, const RunRefs& refs = {}) {
  cfg.validate();
  RunResult<Real> res;
  res.method = cfg.method;
  auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  auto record = [&](const State& s) {
    LogRow row;
    row.iter = s.k;
    if constexpr (std::is_same_v<State, AdmmState<Real>>) {
      row.rel_err = detail::rel_err_vs(s.x, refs.u_ref);
      row.tv = tv_norm_field(s.kx);
      row.residual = detail::omega_residual(s.xhat, proj);
    } else {
      row.rel_err = detail::rel_err_vs(s.u, refs.u_ref);
      row.tv = tv_norm(s.u);
      row.residual = detail::omega_residual(s.uhat, proj);
    }
    row.q_dist = detail::dist_vs(detail::equivalent_q(s, cfg.tau), refs.q_ref);
    row.seconds = elapsed();
    res.log.rows.push_back(row);
    if (refs.on_row) refs.on_row(row);
  };

  record(st);
  VectorField<Real> q_prev = detail::equivalent_q(st, cfg.tau);
  const double qn0 = norm2(q_prev);
  double early_max_delta = 0;
  for (std::int64_t it = 1; it <= cfg.max_iters; ++it) {
    if constexpr (std::is_same_v<State, AdmmState<Real>>) {
      admm_step(st, proj, cfg);
    } else if constexpr (std::is_same_v<State, DrsState<Real>>) {
      drs_step(st, proj, cfg);
    } else {
      pdhg_step(st, proj, cfg);
    }
    VectorField<Real> q_now = detail::equivalent_q(st, cfg.tau);
    double delta = dist2(q_now, q_prev);
    double qn = norm2(q_now);
    detail::ensure_finite(delta + qn, "solver trajectory");
    // baseline over the first iterations; a feasible start can make the very
    // first delta pure roundoff, which must not anchor the growth test
    if (it <= 10) early_max_delta = std::max(early_max_delta, delta);
    if ((it > 10 && delta > 1e6 * early_max_delta) || qn > 1e6 * (1 + qn0))
      throw numerical_error("solver diverging: step residual grew by 1e6x");
    res.iters = it;
    // the first delta can be pure roundoff when the start is feasible with
    // zero dual (q_1 = Ku_1 + tau v_0 reduces to Ku_0), so it never stops
    bool stop = it > 1 && ((qn > 0) ? (delta <= cfg.tol * qn) : (delta <= cfg.tol));
    bool last = stop || it == cfg.max_iters;
    if (it % cfg.log_every == 0 || last) record(st);
    if (stop) {
      res.converged = true;
      break;
    }
    q_prev = std::move(q_now);
  }
  res.state = std::move(st);
  return res;
}

template <class Real>
RunResult<Real> run(const GradientDataProjector<Real>& proj, const SolverConfig& cfg,
                    const RunRefs& refs = {}, const Image<Real>* u0 = nullptr) {
  cfg.validate();
  switch (cfg.method) {
    case Method::admm: return run_from(init_admm(proj, u0), proj, cfg, refs);
    case Method::drs: return run_from(init_drs(proj, cfg, u0), proj, cfg, refs);
    case Method::pdhg: return run_from(init_pdhg(proj, u0), proj, cfg, refs);
  }
  throw std::invalid_argument("config: unknown method");
}

}  // namespace tvcs
