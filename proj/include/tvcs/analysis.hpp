#pragma once
// Convergence-rate machinery: support detection on dual blocks, orthonormal
// bases for the two subspaces whose principal angles drive the local linear
// rate, the closed-form relaxed-operator norm and rate bound, fixed-point and
// dual-certificate verification, and observed-rate fitting from logged
// trajectory distances.

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "tvcs/grid.hpp"
#include "tvcs/mask.hpp"
#include "tvcs/prox.hpp"
#include "tvcs/spectral.hpp"
#include "tvcs/support.hpp"

namespace tvcs {

// Component-major flattening of a field into R^(d*N): coordinate i*N + j holds
// component i at spatial index j.
Eigen::VectorXd flatten_field(const VectorField<double>& p);
VectorField<double> unflatten_field(const GridShape& shape, const Eigen::VectorXd& v);

// Blocks with norm > eps_rel * max block norm form the support.
// Throws numerical_error on an all-zero field.
SupportSet detect_support(const VectorField<double>& v, double eps_rel = 1e-8);

double min_support_magnitude(const VectorField<double>& v, const SupportSet& supp);

// Orthonormal basis of { K u : u real, u-hat = 0 on omega }, built per
// conjugate frequency orbit: one cosine mode for self-conjugate frequencies,
// a cosine/sine pair otherwise, each mapped through K and normalized.
// Distinct orbits occupy disjoint frequencies, so orthonormality is exact.
struct KernelBasis {
  GridShape shape;
  Eigen::MatrixXd C;            // Nd rows, one orthonormal column per mode
  index_t complex_count = 0;    // N - |omega|, the complex-style count
  index_t real_dim() const { return C.cols(); }
};
KernelBasis kernel_basis(const SpectralOperator<double>& spec, const SamplingMask& mask);

// 0/1 selection basis of the fields supported on the support blocks.
Eigen::MatrixXd support_basis(const GridShape& shape, const SupportSet& supp);

struct AngleSpectrum {
  Eigen::VectorXd cosines;      // singular values of C^T B, descending
  int intersection_count = 0;   // values >= 1 - eps_int
  double cos_theta1 = 0;        // largest value below the threshold; NaN if none
  bool lemma_violation = false; // any intersection direction present
};
AngleSpectrum principal_angles(const Eigen::MatrixXd& C, const Eigen::MatrixXd& B,
                               double eps_int = 1e-6);
// Same spectrum computed from the support structure without forming B.
AngleSpectrum principal_angles_support(const KernelBasis& kb, const SupportSet& supp,
                                       double eps_int = 1e-6);

// sqrt(lambda(2-lambda) cos^2 theta1 + (1-lambda)^2); lambda in (0,2).
double spectral_norm_h_lambda(double cos_theta1, double lambda);

// ||H-tilde^lambda|| + 2 tau lambda / min_mag.
double rate_bound(double cos_theta1, double min_mag, double tau, double lambda);

struct CertificateReport {
  SupportSet support;            // detected from v*
  double support_align_err = 0;  // max on-support || eta_j - v*_j/||v*_j|| ||
  double off_support_excess = 0; // max(0, max off-support ||eta_j|| - 1)
  bool subdiff_ok = false;       // condition (a)
  double range_residual = 0;     // off-omega divergence content of eta
  bool range_ok = false;         // condition (b)
  double margin_on = 0;          // min on-support ||q*_j|| - tau
  double margin_off = 0;         // min off-support tau - ||q*_j||
  bool interior = false;         // condition (c), both margins strictly positive
  double fixed_point_residual = 0;  // ||H_tau(q*) - q*||
  double tol = 0;
};
CertificateReport verify_fixed_point(const VectorField<double>& qstar,
                                     const VectorField<double>& vstar, double tau,
                                     const GradientDataProjector<double>& proj,
                                     double tol = 1e-8, double support_eps = 1e-8);

struct RateFit {
  bool found = false;
  double rate = 0;      // exp(slope)
  double slope = 0;     // of log dist per iteration, negative when found
  double r2 = 0;
  std::int64_t onset = 0;   // first index of the accepted window
  std::int64_t window = 0;  // samples in the window
};
// dist[k] = ||q_k - q*||; fits the longest suffix window with R^2 >= 0.999
// and negative slope, over samples above the noise floor
// (default floor: max(3 * smallest positive value, 1e-15 * largest)).
RateFit observed_rate(const std::vector<double>& dist, double noise_floor = -1,
                      std::int64_t min_window = 50);

struct IntersectionReport {
  double cos_theta1 = 0;
  double theta1 = 0;            // radians
  int intersection_count = 0;   // dense path only
  bool lemma_violation = false;
  bool used_power_path = false;
  int power_iters = 0;
};
// Principal angle between K Kernel(A) and Kernel(B-tilde): dense SVD up to
// dense_limit ambient dimensions, alternating-projection power iteration on
// P_B P_C P_B above it.
IntersectionReport intersection_check(const SpectralOperator<double>& spec,
                                      const SamplingMask& mask, const SupportSet& supp,
                                      double eps_int = 1e-6, index_t dense_limit = 4096,
                                      double power_tol = 1e-10, int power_cap = 10000);

// Orthonormal basis of the orthogonal complement of span(C0) + Kernel(B-tilde),
// i.e. of the intersection of the two complements.
Eigen::MatrixXd complement_intersection_basis(const KernelBasis& kb, const SupportSet& supp);

struct RateReport {
  double cos_theta1 = 0;
  double min_mag = 0;
  double tau = 0;
  double lambda = 1;
  double h_norm = 0;
  double bound = 0;
  bool contractive = false;  // bound < 1
  RateFit fit;
  int intersection_dim = 0;
  index_t kernel_real_dim = 0;
  index_t kernel_complex_count = 0;
  index_t support_size = 0;
};
RateReport build_rate_report(const SpectralOperator<double>& spec, const SamplingMask& mask,
                             const VectorField<double>& vstar, double tau, double lambda,
                             const std::vector<double>& q_dist,
                             double support_eps = 1e-8, double eps_int = 1e-6,
                             index_t dense_limit = 4096);

}  // namespace tvcs
