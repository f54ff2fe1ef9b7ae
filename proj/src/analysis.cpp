#include "tvcs/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include "tvcs/util.hpp"

namespace tvcs {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Conjugate orbit representatives off omega; the real kernel dimension is one
// mode per self-conjugate orbit plus two per proper pair.
void collect_orbits(const SamplingMask& mask, std::vector<index_t>& selfs,
                    std::vector<index_t>& pairs) {
  const GridShape& s = mask.shape;
  const std::vector<char> on = omega_membership(mask);
  const index_t nn = s.size();
  selfs.clear();
  pairs.clear();
  for (index_t l = 1; l < nn; ++l) {
    const index_t neg = s.negate(l);
    if (l > neg) continue;
    if (on[static_cast<std::size_t>(l)] || on[static_cast<std::size_t>(neg)]) continue;
    (l == neg ? selfs : pairs).push_back(l);
  }
}

double orbit_phase(const GridShape& s, index_t l, index_t j) {
  const std::array<int, 3> li = s.unflat(l);
  const std::array<int, 3> ji = s.unflat(j);
  double t = 0;
  for (int i = 0; i < s.d; ++i)
    t += static_cast<double>(li[i]) * static_cast<double>(ji[i]) / static_cast<double>(s.n[i]);
  return 2.0 * kPi * t;
}

}  // namespace

Eigen::VectorXd flatten_field(const VectorField<double>& p) {
  const index_t nn = p.shape.size();
  Eigen::VectorXd out(p.shape.d * nn);
  for (int i = 0; i < p.shape.d; ++i)
    for (index_t j = 0; j < nn; ++j)
      out[i * nn + j] = p.c[i][static_cast<std::size_t>(j)];
  return out;
}

VectorField<double> unflatten_field(const GridShape& shape, const Eigen::VectorXd& v) {
  const index_t nn = shape.size();
  if (v.size() != shape.d * nn)
    throw std::invalid_argument("unflatten_field: length does not match shape");
  VectorField<double> p(shape);
  for (int i = 0; i < shape.d; ++i)
    for (index_t j = 0; j < nn; ++j)
      p.c[i][static_cast<std::size_t>(j)] = v[i * nn + j];
  return p;
}

SupportSet detect_support(const VectorField<double>& v, double eps_rel) {
  if (eps_rel < 0) throw std::invalid_argument("detect_support: eps_rel must be >= 0");
  const index_t nn = v.shape.size();
  SupportSet s;
  s.on.assign(static_cast<std::size_t>(nn), 0);
  s.eps = eps_rel;
  s.max_mag = 0;
  for (index_t j = 0; j < nn; ++j) s.max_mag = std::max(s.max_mag, block_norm(v, j));
  if (s.max_mag == 0)
    throw numerical_error("detect_support: all-zero field has no support scale");
  const double thr = eps_rel * s.max_mag;
  s.n_on = 0;
  for (index_t j = 0; j < nn; ++j)
    if (block_norm(v, j) > thr) {
      s.on[static_cast<std::size_t>(j)] = 1;
      ++s.n_on;
    }
  return s;
}

double min_support_magnitude(const VectorField<double>& v, const SupportSet& supp) {
  const index_t nn = v.shape.size();
  if (supp.on.size() != static_cast<std::size_t>(nn))
    throw std::invalid_argument("min_support_magnitude: support size mismatch");
  if (supp.n_on == 0) throw std::invalid_argument("min_support_magnitude: empty support");
  double mn = std::numeric_limits<double>::infinity();
  for (index_t j = 0; j < nn; ++j)
    if (supp.on[static_cast<std::size_t>(j)]) mn = std::min(mn, block_norm(v, j));
  return mn;
}

KernelBasis kernel_basis(const SpectralOperator<double>& spec, const SamplingMask& mask) {
  const GridShape& s = spec.shape;
  if (mask.shape != s) throw std::invalid_argument("kernel_basis: mask shape mismatch");
  const index_t nn = s.size();
  std::vector<index_t> selfs, pairs;
  collect_orbits(mask, selfs, pairs);

  KernelBasis kb;
  kb.shape = s;
  kb.complex_count = nn - static_cast<index_t>(mask.omega.size());
  const index_t cols = static_cast<index_t>(selfs.size()) + 2 * static_cast<index_t>(pairs.size());
  kb.C.resize(s.d * nn, cols);

  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(nn));
  index_t col = 0;
  Image<double> u(s);
  auto push_mode = [&]() {
    VectorField<double> g = gradient(u);
    Eigen::VectorXd c = flatten_field(g);
    const double nrm = c.norm();
    kb.C.col(col++) = c / nrm;
  };
  for (index_t l : selfs) {
    // 2l = 0 per axis, so the phase is a multiple of pi and the mode is +-1/sqrt(N)
    for (index_t j = 0; j < nn; ++j)
      u.v[static_cast<std::size_t>(j)] = inv_sqrt_n * std::cos(orbit_phase(s, l, j));
    push_mode();
  }
  const double amp = std::sqrt(2.0) * inv_sqrt_n;
  for (index_t l : pairs) {
    for (index_t j = 0; j < nn; ++j)
      u.v[static_cast<std::size_t>(j)] = amp * std::cos(orbit_phase(s, l, j));
    push_mode();
    for (index_t j = 0; j < nn; ++j)
      u.v[static_cast<std::size_t>(j)] = amp * std::sin(orbit_phase(s, l, j));
    push_mode();
  }
  return kb;
}

Eigen::MatrixXd support_basis(const GridShape& shape, const SupportSet& supp) {
  const index_t nn = shape.size();
  if (supp.on.size() != static_cast<std::size_t>(nn))
    throw std::invalid_argument("support_basis: support size mismatch");
  if (supp.n_on == 0) throw std::invalid_argument("support_basis: empty support");
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(shape.d * nn, shape.d * supp.n_on);
  index_t col = 0;
  for (int i = 0; i < shape.d; ++i)
    for (index_t j = 0; j < nn; ++j)
      if (supp.on[static_cast<std::size_t>(j)]) B(i * nn + j, col++) = 1.0;
  return B;
}

namespace {

AngleSpectrum classify_cosines(Eigen::VectorXd sv, double eps_int) {
  for (Eigen::Index i = 0; i < sv.size(); ++i) sv[i] = std::min(sv[i], 1.0);
  AngleSpectrum a;
  a.cosines = sv;
  const double thr = 1.0 - eps_int;
  a.intersection_count = 0;
  a.cos_theta1 = std::numeric_limits<double>::quiet_NaN();
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] >= thr) {
      ++a.intersection_count;
    } else {
      a.cos_theta1 = sv[i];  // values are descending, first below is the max
      break;
    }
  }
  a.lemma_violation = a.intersection_count > 0;
  return a;
}

}  // namespace

AngleSpectrum principal_angles(const Eigen::MatrixXd& C, const Eigen::MatrixXd& B,
                               double eps_int) {
  if (C.cols() == 0 || B.cols() == 0)
    throw std::invalid_argument("principal_angles: empty basis");
  if (C.rows() != B.rows()) throw std::invalid_argument("principal_angles: row mismatch");
  Eigen::MatrixXd M = C.transpose() * B;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(M);
  return classify_cosines(svd.singularValues(), eps_int);
}

AngleSpectrum principal_angles_support(const KernelBasis& kb, const SupportSet& supp,
                                       double eps_int) {
  const index_t nn = kb.shape.size();
  if (kb.C.cols() == 0) throw std::invalid_argument("principal_angles_support: empty kernel");
  if (supp.on.size() != static_cast<std::size_t>(nn))
    throw std::invalid_argument("principal_angles_support: support size mismatch");
  if (supp.n_on == 0) throw std::invalid_argument("principal_angles_support: empty support");
  // C^T B is C restricted to the support coordinates, so skip forming B.
  Eigen::MatrixXd sub(kb.shape.d * supp.n_on, kb.C.cols());
  index_t row = 0;
  for (int i = 0; i < kb.shape.d; ++i)
    for (index_t j = 0; j < nn; ++j)
      if (supp.on[static_cast<std::size_t>(j)]) sub.row(row++) = kb.C.row(i * nn + j);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(sub);
  return classify_cosines(svd.singularValues(), eps_int);
}

double spectral_norm_h_lambda(double cos_theta1, double lambda) {
  if (!(lambda > 0.0) || !(lambda < 2.0))
    throw std::invalid_argument("spectral_norm_h_lambda: lambda must lie in (0,2)");
  if (!(cos_theta1 >= 0.0) || cos_theta1 > 1.0 + 1e-9)
    throw std::invalid_argument("spectral_norm_h_lambda: cos out of [0,1]");
  const double c = std::min(cos_theta1, 1.0);
  const double oml = 1.0 - lambda;
  return std::sqrt(lambda * (2.0 - lambda) * c * c + oml * oml);
}

double rate_bound(double cos_theta1, double min_mag, double tau, double lambda) {
  if (!(min_mag > 0) || !std::isfinite(min_mag))
    throw std::invalid_argument("rate_bound: min support magnitude must be positive");
  if (!(tau >= 0) || !std::isfinite(tau))
    throw std::invalid_argument("rate_bound: tau must be nonnegative");
  return spectral_norm_h_lambda(cos_theta1, lambda) + 2.0 * tau * lambda / min_mag;
}

CertificateReport verify_fixed_point(const VectorField<double>& qstar,
                                     const VectorField<double>& vstar, double tau,
                                     const GradientDataProjector<double>& proj,
                                     double tol, double support_eps) {
  const GridShape& s = proj.spectral().shape;
  if (qstar.shape != s || vstar.shape != s)
    throw std::invalid_argument("verify_fixed_point: shape mismatch");
  if (!(tau > 0)) throw std::invalid_argument("verify_fixed_point: tau must be positive");
  const index_t nn = s.size();

  CertificateReport r;
  r.tol = tol;
  r.support = detect_support(vstar, support_eps);

  VectorField<double> eta(s);
  for (int i = 0; i < s.d; ++i)
    for (index_t j = 0; j < nn; ++j)
      eta.c[i][static_cast<std::size_t>(j)] =
          (qstar.c[i][static_cast<std::size_t>(j)] - vstar.c[i][static_cast<std::size_t>(j)]) / tau;

  // (a) eta is in the subdifferential of the block norm at v*
  double align = 0, excess = 0;
  for (index_t j = 0; j < nn; ++j) {
    if (r.support.on[static_cast<std::size_t>(j)]) {
      const double bn = block_norm(vstar, j);
      double e2 = 0;
      for (int i = 0; i < s.d; ++i) {
        const double diff = eta.c[i][static_cast<std::size_t>(j)] -
                            vstar.c[i][static_cast<std::size_t>(j)] / bn;
        e2 += diff * diff;
      }
      align = std::max(align, std::sqrt(e2));
    } else {
      excess = std::max(excess, block_norm(eta, j) - 1.0);
    }
  }
  r.support_align_err = align;
  r.off_support_excess = std::max(0.0, excess);
  r.subdiff_ok = align <= tol && r.off_support_excess <= tol;

  // (b) the divergence spectrum of eta vanishes off omega
  const auto& on = proj.on_omega();
  const auto& spec = proj.spectral();
  std::array<std::vector<std::complex<double>>, 3> ehat;
  for (int i = 0; i < s.d; ++i) ehat[i] = spec.dft.forward_real(eta.c[i]);
  double res2 = 0;
  for (index_t l = 0; l < nn; ++l) {
    if (on[static_cast<std::size_t>(l)]) continue;
    std::complex<double> div(0, 0);
    for (int i = 0; i < s.d; ++i)
      div += std::conj(spec.lam[i][static_cast<std::size_t>(l)]) *
             ehat[i][static_cast<std::size_t>(l)];
    res2 += std::norm(div);
  }
  r.range_residual = std::sqrt(res2);
  r.range_ok = r.range_residual <= tol * (1.0 + norm2(eta));

  // (c) strict margins of q* around the shrinkage kink
  double mon = std::numeric_limits<double>::infinity();
  double moff = std::numeric_limits<double>::infinity();
  for (index_t j = 0; j < nn; ++j) {
    const double bq = block_norm(qstar, j);
    if (r.support.on[static_cast<std::size_t>(j)])
      mon = std::min(mon, bq - tau);
    else
      moff = std::min(moff, tau - bq);
  }
  if (r.support.n_on == nn) moff = std::numeric_limits<double>::infinity();
  r.margin_on = mon;
  r.margin_off = moff;
  r.interior = mon > 0 && moff > 0;

  // H(q*) - q* = prox_h(2 v* - q*) - v*
  VectorField<double> refl = reflect_from(vstar, qstar);
  VectorField<double> ph = proj.apply(refl);
  r.fixed_point_residual = dist2(ph, vstar);
  return r;
}

RateFit observed_rate(const std::vector<double>& dist, double noise_floor,
                      std::int64_t min_window) {
  RateFit fit;
  if (min_window < 3) throw std::invalid_argument("observed_rate: min_window must be >= 3");
  const std::int64_t n = static_cast<std::int64_t>(dist.size());
  if (n == 0) return fit;

  double max_val = 0, min_pos = std::numeric_limits<double>::infinity();
  for (double d : dist) {
    if (!(d >= 0) || !std::isfinite(d))
      throw std::invalid_argument("observed_rate: distances must be finite and nonnegative");
    max_val = std::max(max_val, d);
    if (d > 0) min_pos = std::min(min_pos, d);
  }
  if (max_val == 0) return fit;
  const double floor_v =
      noise_floor >= 0 ? noise_floor : std::max(3.0 * min_pos, 1e-15 * max_val);

  std::int64_t k_last = n;
  for (std::int64_t k = 0; k < n; ++k)
    if (dist[static_cast<std::size_t>(k)] <= floor_v) {
      k_last = k;
      break;
    }
  if (k_last < min_window) return fit;

  std::vector<double> y(static_cast<std::size_t>(k_last));
  for (std::int64_t k = 0; k < k_last; ++k)
    y[static_cast<std::size_t>(k)] = std::log(dist[static_cast<std::size_t>(k)]);

  // longest suffix window [start, k_end) with R^2 >= 0.999 and negative slope;
  // if no suffix anchored at the noise floor fits, the final approach is bent
  // (terminal identification accelerates the decay), so retreat the window end
  // until the dominant log-linear regime is exposed
  const std::int64_t retreat = std::max<std::int64_t>(min_window / 2, 10);
  std::int64_t best = -1, k_end = k_last;
  for (int pass = 0; pass < 40 && best < 0; ++pass, k_end -= retreat) {
    if (k_end < min_window) return fit;
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    double cnt = 0;
    for (std::int64_t start = k_end - 1; start >= 0; --start) {
      const double x = static_cast<double>(start - (k_end - 1));
      const double yy = y[static_cast<std::size_t>(start)];
      sx += x;
      sy += yy;
      sxx += x * x;
      syy += yy * yy;
      sxy += x * yy;
      cnt += 1;
      if (k_end - start < min_window) continue;
      const double vx = cnt * sxx - sx * sx;
      const double vy = cnt * syy - sy * sy;
      const double cov = cnt * sxy - sx * sy;
      if (vx <= 0 || vy <= 1e-30) continue;  // flat or degenerate window
      const double r2 = cov * cov / (vx * vy);
      const double slope = cov / vx;
      if (r2 >= 0.999 && slope < 0) best = start;
    }
  }
  if (best < 0) return fit;
  k_end += retreat;  // undo the final loop decrement

  // two-pass centered refit of the chosen window for full precision
  const std::int64_t m = k_end - best;
  double xm = 0, ym = 0;
  for (std::int64_t k = best; k < k_end; ++k) {
    xm += static_cast<double>(k);
    ym += y[static_cast<std::size_t>(k)];
  }
  xm /= static_cast<double>(m);
  ym /= static_cast<double>(m);
  double vxx = 0, vxy = 0, vyy = 0;
  for (std::int64_t k = best; k < k_end; ++k) {
    const double dx = static_cast<double>(k) - xm;
    const double dy = y[static_cast<std::size_t>(k)] - ym;
    vxx += dx * dx;
    vxy += dx * dy;
    vyy += dy * dy;
  }
  fit.found = true;
  fit.slope = vxy / vxx;
  fit.rate = std::exp(fit.slope);
  fit.r2 = vyy > 0 ? vxy * vxy / (vxx * vyy) : 1.0;
  fit.onset = best;
  fit.window = m;
  return fit;
}

namespace {

// Orthogonal projection onto K Kernel(A): keep only off-omega divergence
// content, frequency by frequency.
VectorField<double> project_kernel(const VectorField<double>& p,
                                   const SpectralOperator<double>& spec,
                                   const std::vector<char>& on) {
  const GridShape& s = spec.shape;
  const index_t nn = s.size();
  std::array<std::vector<std::complex<double>>, 3> phat;
  for (int i = 0; i < s.d; ++i) phat[i] = spec.dft.forward_real(p.c[i]);
  for (index_t l = 0; l < nn; ++l) {
    const std::size_t sl = static_cast<std::size_t>(l);
    std::complex<double> coef(0, 0);
    if (l != 0 && !on[sl]) {
      std::complex<double> acc(0, 0);
      for (int i = 0; i < s.d; ++i) acc += std::conj(spec.lam[i][sl]) * phat[i][sl];
      coef = acc / static_cast<double>(spec.denom[sl]);
    }
    for (int i = 0; i < s.d; ++i) phat[i][sl] = spec.lam[i][sl] * coef;
  }
  VectorField<double> out(s);
  for (int i = 0; i < s.d; ++i)
    out.c[i] = spec.dft.inverse_real(phat[i], default_imag_guard<double>()).v;
  return out;
}

void project_support(VectorField<double>& p, const SupportSet& supp) {
  const index_t nn = p.shape.size();
  for (index_t j = 0; j < nn; ++j)
    if (!supp.on[static_cast<std::size_t>(j)])
      for (int i = 0; i < p.shape.d; ++i) p.c[i][static_cast<std::size_t>(j)] = 0;
}

}  // namespace

IntersectionReport intersection_check(const SpectralOperator<double>& spec,
                                      const SamplingMask& mask, const SupportSet& supp,
                                      double eps_int, index_t dense_limit, double power_tol,
                                      int power_cap) {
  const GridShape& s = spec.shape;
  const index_t nn = s.size();
  if (supp.on.size() != static_cast<std::size_t>(nn))
    throw std::invalid_argument("intersection_check: support size mismatch");
  if (supp.n_on == 0) throw std::invalid_argument("intersection_check: empty support");

  IntersectionReport rep;
  if (s.d * nn <= dense_limit) {
    KernelBasis kb = kernel_basis(spec, mask);
    if (kb.real_dim() == 0) throw std::invalid_argument("intersection_check: empty kernel");
    AngleSpectrum a = principal_angles_support(kb, supp, eps_int);
    rep.cos_theta1 = a.cos_theta1;
    rep.intersection_count = a.intersection_count;
    rep.lemma_violation = a.lemma_violation;
    const double c = std::isnan(a.cos_theta1) ? 1.0 : a.cos_theta1;
    rep.theta1 = std::acos(std::clamp(c, 0.0, 1.0));
    return rep;
  }

  std::vector<index_t> selfs, pairs;
  collect_orbits(mask, selfs, pairs);
  if (selfs.empty() && pairs.empty())
    throw std::invalid_argument("intersection_check: empty kernel");

  rep.used_power_path = true;
  const std::vector<char> on = omega_membership(mask);
  // dominant eigenvalue of M = P_B P_C P_B is cos^2 theta1
  Rng rng(1234);
  VectorField<double> v = random_field<double>(s, rng);
  project_support(v, supp);
  double nv = norm2(v);
  if (nv == 0) {
    rep.cos_theta1 = 0;
    rep.theta1 = kPi / 2;
    return rep;
  }
  for (int i = 0; i < s.d; ++i)
    for (double& x : v.c[i]) x /= nv;

  double lam_prev = -1, lam = 0;
  int it = 0;
  for (; it < power_cap; ++it) {
    VectorField<double> w = project_kernel(v, spec, on);
    project_support(w, supp);
    lam = dot(v, w);
    const double nw = norm2(w);
    if (nw < 1e-18) {
      lam = 0;
      break;
    }
    for (int i = 0; i < s.d; ++i)
      for (double& x : w.c[i]) x /= nw;
    v = w;
    if (it > 0 && std::abs(lam - lam_prev) <= power_tol * std::max(1.0, std::abs(lam))) break;
    lam_prev = lam;
  }
  rep.power_iters = it + 1;
  const double c = std::sqrt(std::clamp(lam, 0.0, 1.0));
  rep.cos_theta1 = c;
  rep.theta1 = std::acos(std::clamp(c, 0.0, 1.0));
  if (c >= 1.0 - eps_int) {
    rep.intersection_count = 1;
    rep.lemma_violation = true;
    rep.cos_theta1 = std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

Eigen::MatrixXd complement_intersection_basis(const KernelBasis& kb, const SupportSet& supp) {
  const index_t rows = kb.shape.d * kb.shape.size();
  Eigen::MatrixXd B = support_basis(kb.shape, supp);
  Eigen::MatrixXd U(rows, kb.C.cols() + B.cols());
  U << kb.C, B;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(U, Eigen::ComputeFullU);
  const Eigen::VectorXd& sv = svd.singularValues();
  Eigen::Index rank = 0;
  const double thr = sv.size() ? 1e-10 * sv[0] : 0.0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > thr) ++rank;
  return svd.matrixU().rightCols(rows - rank);
}

RateReport build_rate_report(const SpectralOperator<double>& spec, const SamplingMask& mask,
                             const VectorField<double>& vstar, double tau, double lambda,
                             const std::vector<double>& q_dist, double support_eps,
                             double eps_int, index_t dense_limit) {
  RateReport r;
  r.tau = tau;
  r.lambda = lambda;
  const SupportSet supp = detect_support(vstar, support_eps);
  r.support_size = supp.n_on;
  r.min_mag = min_support_magnitude(vstar, supp);

  std::vector<index_t> selfs, pairs;
  collect_orbits(mask, selfs, pairs);
  r.kernel_real_dim = static_cast<index_t>(selfs.size()) + 2 * static_cast<index_t>(pairs.size());
  r.kernel_complex_count = spec.shape.size() - static_cast<index_t>(mask.omega.size());

  IntersectionReport ir =
      intersection_check(spec, mask, supp, eps_int, dense_limit);
  r.cos_theta1 = ir.cos_theta1;
  r.intersection_dim = ir.intersection_count;
  const double c = std::isnan(ir.cos_theta1) ? 1.0 : ir.cos_theta1;
  r.h_norm = spectral_norm_h_lambda(c, lambda);
  r.bound = rate_bound(c, r.min_mag, tau, lambda);
  r.contractive = r.bound < 1.0;
  if (!q_dist.empty()) r.fit = observed_rate(q_dist);
  return r;
}

}  // namespace tvcs
