#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "lpl/errors.hpp"

namespace lpl {

/// Lower and upper threshold constants for the sample-size control
/// parameter theta. Recovery fails with high probability below theta_l
/// and succeeds with high probability above theta_u (asymptotically).
struct ThresholdPair {
  double theta_l = 0.0;
  double theta_u = 0.0;
};

/// Closed-form thresholds from the ensemble constants:
///   theta_l = (sqrt(c_max) - sqrt(c_max - 1/c_max))^2 / (c_max (2-eps)^2)
///   theta_u = c_max / (eps^2 c_min)
/// Requires 0 < c_min <= c_max, c_max >= 1, eps in (0, 1].
inline ThresholdPair recovery_thresholds(double c_min, double c_max,
                                         double epsilon) {
  if (!(c_min > 0.0) || !(c_min <= c_max) || !(c_max >= 1.0) ||
      !(epsilon > 0.0 && epsilon <= 1.0))
    throw InvalidConstants(
        "need 0 < c_min <= c_max, c_max >= 1, epsilon in (0,1]");
  ThresholdPair t;
  const double root = std::sqrt(c_max) - std::sqrt(c_max - 1.0 / c_max);
  t.theta_l = root * root / (c_max * (2.0 - epsilon) * (2.0 - epsilon));
  t.theta_u = c_max / (epsilon * epsilon * c_min);
  if (!(t.theta_l <= 1.0 + 1e-12) || !(t.theta_u >= 1.0 - 1e-12))
    throw InvalidConstants("threshold formulas left their valid range");
  return t;
}

/// Sample count n(theta) = ceil(2 theta s ln(p - s) + s + 1), clamped to
/// at least s + 2 so the support Gram matrix is invertible almost surely.
inline int sample_size(double theta, int s, int p) {
  if (!(theta > 0.0)) throw ConfigError("theta must be positive");
  if (s < 1 || s >= p) throw ConfigError("need 1 <= s < p");
  if (p - s < 2)
    throw DegenerateGeometry("need p - s >= 2 for the sample-size law");
  const double raw =
      2.0 * theta * s * std::log(static_cast<double>(p - s)) + s + 1.0;
  const long long n = static_cast<long long>(std::ceil(raw));
  return static_cast<int>(std::max<long long>(n, s + 2));
}

/// Regularization schedule lambda_n = sqrt(ln(p-s) ln(s) / n).
/// Needs s >= 2 so ln(s) > 0; callers with s == 1 must pick lambda
/// themselves.
inline double lambda_schedule(int n, int p, int s) {
  if (s < 2)
    throw DegenerateSparsity("schedule needs s >= 2; supply lambda directly");
  if (p - s < 2) throw DegenerateGeometry("schedule needs p - s >= 2");
  if (n < 1) throw ConfigError("n must be positive");
  return std::sqrt(std::log(static_cast<double>(p - s)) *
                   std::log(static_cast<double>(s)) / static_cast<double>(n));
}

/// Moments of the random factor that scales the conditional covariance of
/// the off-support variables:
///   m = lambda^2 b^T (X_S^T X_S)^-1 b + (1/n^2) w^T (I - P_S) w.
struct CovScaleMoments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Exact mean and variance of the covariance scale factor, given
/// q = b^T Sigma_SS^-1 b. Valid for n > s + 3 (InsufficientDof below).
inline CovScaleMoments cov_scale_moments(double lambda, int n, int s,
                                         double sigma2, double quad_form) {
  if (n <= s + 3)
    throw InsufficientDof("cov_scale_moments requires n > s + 3");
  const double a = static_cast<double>(n - s);
  const double nn = static_cast<double>(n);
  CovScaleMoments m;
  m.mean = lambda * lambda * quad_form / (a - 1.0) + sigma2 * a / (nn * nn);
  const double sigma4 = sigma2 * sigma2;
  const double lam4 = lambda * lambda * lambda * lambda;
  const double brace = 1.0 / a + (a - 1.0) / a - (a - 3.0) / (a - 1.0);
  m.variance = 2.0 * a * sigma4 / (nn * nn * nn * nn) +
               lam4 * quad_form * quad_form / ((a - 1.0) * (a - 3.0)) * brace;
  return m;
}

/// q = b^T Sigma_SS^-1 b, the quadratic form feeding cov_scale_moments.
inline double inv_quad_form(const Eigen::MatrixXd& sigma_ss,
                            const Eigen::VectorXd& b_vec) {
  Eigen::LLT<Eigen::MatrixXd> llt(sigma_ss);
  if (llt.info() != Eigen::Success)
    throw SingularSubmatrix("Sigma_SS is not positive definite");
  return b_vec.dot(llt.solve(b_vec));
}

/// Expected conditional mean / conditional variance of the support-shift
/// variable u_i over the random design, with the deterministic bounds
/// they must respect.
struct UConditionalMoments {
  double mean_of_cond_mean = 0.0;  // E[ E[u_i | X_S] ]
  double mean_of_cond_var = 0.0;   // E[ var[u_i | X_S] ]
  double bound_abs_mean = 0.0;     // 2 d_max n lambda / (n - s - 1)
  double bound_var_lo = 0.0;       // sigma2 / (c_max (n - s - 1)); NaN if
                                   // c_max was not supplied
  double bound_var_hi = 0.0;       // sigma2 d_max / (n - s - 1)
};

/// Closed forms:
///   E[E[u_i|X_S]]  = -lambda n / (n-s-1) e_i^T Sigma_SS^-1 b
///   E[var[u_i|X_S]] = sigma2 / (n-s-1) e_i^T Sigma_SS^-1 e_i
/// d_max is taken from sigma_ss_inv; pass c_max to fill the lower
/// variance bound.
inline UConditionalMoments u_conditional_moments(
    double lambda, int n, int s, double sigma2,
    const Eigen::MatrixXd& sigma_ss_inv, const Eigen::VectorXd& b_vec, int i,
    double c_max = std::numeric_limits<double>::quiet_NaN()) {
  if (n <= s + 1)
    throw InsufficientDof("u_conditional_moments requires n > s + 1");
  if (sigma_ss_inv.rows() != s || sigma_ss_inv.cols() != s ||
      b_vec.size() != s || i < 0 || i >= s)
    throw DimensionMismatch("u_conditional_moments: shapes disagree");
  const double dof = static_cast<double>(n - s - 1);
  const double d_max = sigma_ss_inv.cwiseAbs().rowwise().sum().maxCoeff();
  UConditionalMoments out;
  out.mean_of_cond_mean = -lambda * n / dof * sigma_ss_inv.row(i).dot(b_vec);
  out.mean_of_cond_var = sigma2 / dof * sigma_ss_inv(i, i);
  out.bound_abs_mean = 2.0 * d_max * n * lambda / dof;
  out.bound_var_hi = sigma2 * d_max / dof;
  out.bound_var_lo = sigma2 / (c_max * dof);
  return out;
}

/// Upper bound on the expected maximum absolute value of k jointly
/// Gaussian variables: 3 sqrt(ln k) max_i sqrt(E x_i^2).
inline double gaussian_max_bound(double k, double max_std) {
  if (!(k >= 2.0)) throw ConfigError("gaussian_max_bound needs k >= 2");
  if (max_std < 0.0) throw ConfigError("max_std must be nonnegative");
  return 3.0 * std::sqrt(std::log(k)) * max_std;
}

/// E[(X_S^T X_S)^-1] = Sigma_SS^-1 / (n - s - 1) for Gaussian rows.
inline Eigen::MatrixXd inverse_wishart_mean(const Eigen::MatrixXd& sigma_ss,
                                            int n) {
  const int s = static_cast<int>(sigma_ss.rows());
  if (n <= s + 1)
    throw InsufficientDof("inverse_wishart_mean requires n > s + 1");
  Eigen::LLT<Eigen::MatrixXd> llt(sigma_ss);
  if (llt.info() != Eigen::Success)
    throw SingularSubmatrix("Sigma_SS is not positive definite");
  return llt.solve(Eigen::MatrixXd::Identity(s, s)) /
         static_cast<double>(n - s - 1);
}

/// Asymptotic eigenvalue range of the rho^|i-j| Toeplitz family from its
/// spectral density (1 - rho^2) / (1 - 2 rho cos w + rho^2):
///   min -> (1-|rho|)/(1+|rho|),  max -> (1+|rho|)/(1-|rho|).
/// Finite-p eigenvalues lie strictly inside this interval.
inline std::pair<double, double> toeplitz_spectrum_range(double rho) {
  if (!(std::abs(rho) < 1.0))
    throw InvalidRho("toeplitz correlation must satisfy |rho| < 1");
  const double r = std::abs(rho);
  return {(1.0 - r) / (1.0 + r), (1.0 + r) / (1.0 - r)};
}

}  // namespace lpl
