#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "lpl/covariance.hpp"
#include "lpl/ensemble.hpp"
#include "lpl/errors.hpp"

namespace lpl {

/// The two collections of variables whose extremes decide sign recovery:
/// u[i] is the shift added to the true support coefficient i at the
/// optimum, v[j] is lambda times the subgradient the optimum would need
/// on off-support coordinate j.
struct UVVariables {
  Eigen::VectorXd u;      // size s
  Eigen::VectorXd v;      // size p - s
  Eigen::VectorXd b_vec;  // sgn(beta*_S)
  int off_support_count() const { return static_cast<int>(v.size()); }
};

/// Outcome of the exact sign-recovery test for one instance.
///
/// cond_a: every off-support subgradient is admissible (max |v| <= lambda).
/// cond_b: every perturbed support coefficient keeps its sign, strictly:
///         min_i sgn(beta*_i) (beta*_i + u_i) > delta_b. A coefficient
///         that crossed zero would make the candidate inconsistent with
///         its own subgradient, so mere nonzeroness is not enough.
/// Recovery holds exactly when both are true. event_mu (max |u| <= rho_min)
/// is sufficient but not necessary for cond_b.
struct RecoveryCertificate {
  bool cond_a = false;
  bool cond_b = false;
  double margin_a = 0.0;    // lambda - max_j |v_j|
  double margin_b = 0.0;    // rho_min - max_i |u_i|
  double boundary_b = 0.0;  // min_i sgn(beta*_i) (beta*_i + u_i), signed
                            // distance to the cond_b boundary
  bool event_mv = false;    // identical to cond_a
  bool event_mu = false;    // margin_b >= 0
  bool ambiguous = false;   // within tolerance of either decision boundary
};

/// Sample and population incoherence diagnostics for one (X, Sigma, S).
struct DesignConditionReport {
  double epsilon_sample = 0.0;     // 1 - ||X_Sc^T X_S (X_S^T X_S)^-1||_inf
  double lambda_min_sample = 0.0;  // smallest eigenvalue of (1/n) X_S^T X_S
  double epsilon_pop = 0.0;        // 1 - ||Sigma_ScS Sigma_SS^-1||_inf
  double c_min = 0.0;              // smallest eigenvalue of Sigma_SS
  double c_max = 0.0;              // largest eigenvalue of Sigma
  double d_max = 0.0;              // ||Sigma_SS^-1||_inf
};

struct PopulationConstants {
  double epsilon = 0.0;
  double c_min = 0.0;
  double c_max = 0.0;
  double d_max = 0.0;
};

namespace detail {

/// Max absolute row sum (the operator norm from l-inf to l-inf).
inline double inf_norm(const Eigen::MatrixXd& m) {
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

inline std::vector<int> complement(int p, const std::vector<int>& support) {
  std::vector<int> rest;
  rest.reserve(p - support.size());
  std::size_t k = 0;
  for (int j = 0; j < p; ++j) {
    if (k < support.size() && support[k] == j) {
      ++k;
    } else {
      rest.push_back(j);
    }
  }
  return rest;
}

inline Eigen::MatrixXd select_columns(const Eigen::MatrixXd& X,
                                      const std::vector<int>& cols) {
  Eigen::MatrixXd out(X.rows(), cols.size());
  for (std::size_t k = 0; k < cols.size(); ++k) out.col(k) = X.col(cols[k]);
  return out;
}

inline Eigen::MatrixXd select_block(const Eigen::MatrixXd& m,
                                    const std::vector<int>& rows,
                                    const std::vector<int>& cols) {
  Eigen::MatrixXd out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      out(i, j) = m(rows[i], cols[j]);
  return out;
}

/// Cholesky of the support Gram matrix X_S^T X_S with a conditioning
/// guard: reciprocal condition below 1e-12 is treated as singular.
inline Eigen::LLT<Eigen::MatrixXd> guarded_gram_factor(
    const Eigen::MatrixXd& gram) {
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success)
    throw SingularGram("support Gram matrix is not positive definite");
  if (llt.rcond() < 1e-12)
    throw SingularGram("support Gram matrix is numerically singular");
  return llt;
}

}  // namespace detail

/// Computes the (u, v) variables for one instance. Requires an invertible
/// support Gram matrix (SingularGram otherwise).
inline UVVariables compute_uv(const Eigen::MatrixXd& X,
                              const SparseSignal& signal,
                              const Eigen::VectorXd& noise, double lambda) {
  if (X.cols() != signal.dim() || X.rows() != noise.size())
    throw DimensionMismatch("compute_uv: shapes disagree");
  const int p = signal.dim();
  const int s = signal.sparsity();
  const double n = static_cast<double>(X.rows());

  const std::vector<int> off = detail::complement(p, signal.support);
  const Eigen::MatrixXd Xs = detail::select_columns(X, signal.support);
  const Eigen::MatrixXd Xoff = detail::select_columns(X, off);

  UVVariables uv;
  uv.b_vec.resize(s);
  for (int i = 0; i < s; ++i)
    uv.b_vec[i] = signal.beta_star[signal.support[i]] > 0.0 ? 1.0 : -1.0;

  const Eigen::MatrixXd gram = Xs.transpose() * Xs;
  const auto factor = detail::guarded_gram_factor(gram);

  // t = (X_S^T X_S)^-1 [(1/n) X_S^T w - lambda b]
  const Eigen::VectorXd t =
      factor.solve((Xs.transpose() * noise) / n - lambda * uv.b_vec);
  uv.u = n * t;
  // v = X_Sc^T (w/n - X_S t); algebraically identical to
  // X_Sc^T { X_S (X_S^T X_S)^-1 lambda b - [P_S - I] w/n } with
  // P_S the projector onto the span of X_S.
  uv.v = Xoff.transpose() * (noise / n - Xs * t);
  return uv;
}

/// Exact sign-recovery certificate. The decision matches the optimality
/// conditions of the l1 quadratic program: recovery holds iff cond_a and
/// cond_b. delta_b is the strictness margin for the open inequality in
/// cond_b (ties break toward failure); instances within ambiguity_tol of
/// either decision boundary are flagged ambiguous.
inline RecoveryCertificate certify_sign_recovery(const Eigen::MatrixXd& X,
                                                 const SparseSignal& signal,
                                                 const Eigen::VectorXd& noise,
                                                 double lambda,
                                                 double delta_b = 0.0,
                                                 double ambiguity_tol = 1e-6) {
  if (!(lambda > 0.0))
    throw ConfigError("certify_sign_recovery requires lambda > 0");
  if (delta_b < 0.0) throw ConfigError("delta_b must be nonnegative");

  const UVVariables uv = compute_uv(X, signal, noise, lambda);
  const int s = signal.sparsity();

  RecoveryCertificate cert;
  const double max_abs_v = uv.v.size() > 0 ? uv.v.cwiseAbs().maxCoeff() : 0.0;
  cert.margin_a = lambda - max_abs_v;
  cert.cond_a = cert.margin_a >= 0.0;
  cert.event_mv = cert.cond_a;

  const double max_abs_u = uv.u.cwiseAbs().maxCoeff();
  cert.margin_b = signal.rho_min - max_abs_u;
  cert.event_mu = cert.margin_b >= 0.0;

  double boundary = std::numeric_limits<double>::infinity();
  for (int i = 0; i < s; ++i) {
    const double signed_value =
        uv.b_vec[i] * (signal.beta_star[signal.support[i]] + uv.u[i]);
    boundary = std::min(boundary, signed_value);
  }
  cert.boundary_b = boundary;
  cert.cond_b = boundary > delta_b;

  cert.ambiguous = std::abs(cert.margin_a) <= ambiguity_tol ||
                   std::abs(cert.boundary_b - delta_b) <= ambiguity_tol;
  return cert;
}

/// Sample incoherence epsilon and the smallest eigenvalue of the
/// normalized support Gram matrix.
inline std::pair<double, double> sample_incoherence(
    const Eigen::MatrixXd& X, const std::vector<int>& support) {
  const int p = static_cast<int>(X.cols());
  const double n = static_cast<double>(X.rows());
  const std::vector<int> off = detail::complement(p, support);
  const Eigen::MatrixXd Xs = detail::select_columns(X, support);
  const Eigen::MatrixXd Xoff = detail::select_columns(X, off);

  const Eigen::MatrixXd gram = Xs.transpose() * Xs;
  const auto factor = detail::guarded_gram_factor(gram);

  // rows of X_Sc^T X_S (X_S^T X_S)^-1
  const Eigen::MatrixXd cross =
      factor.solve(Xs.transpose() * Xoff).transpose();
  const double eps_sample =
      1.0 - (off.empty() ? 0.0 : detail::inf_norm(cross));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram / n);
  if (eig.info() != Eigen::Success)
    throw SingularGram("eigendecomposition of support Gram failed");
  return {eps_sample, eig.eigenvalues().minCoeff()};
}

/// Population counterparts computed from Sigma: incoherence epsilon,
/// eigenvalue extremes, and the row-sum norm of Sigma_SS^-1.
inline PopulationConstants population_constants(
    const Covariance& cov, const std::vector<int>& support) {
  const int p = cov.dim();
  const std::vector<int> off = detail::complement(p, support);
  const Eigen::MatrixXd sigma_ss =
      detail::select_block(cov.sigma, support, support);
  const Eigen::MatrixXd sigma_off_s =
      detail::select_block(cov.sigma, off, support);

  Eigen::LLT<Eigen::MatrixXd> llt(sigma_ss);
  if (llt.info() != Eigen::Success || llt.rcond() < 1e-12)
    throw SingularSubmatrix("Sigma_SS is numerically singular");

  PopulationConstants out;
  const Eigen::MatrixXd cross = llt.solve(sigma_off_s.transpose()).transpose();
  out.epsilon = 1.0 - (off.empty() ? 0.0 : detail::inf_norm(cross));

  const Eigen::MatrixXd sigma_ss_inv =
      llt.solve(Eigen::MatrixXd::Identity(support.size(), support.size()));
  out.d_max = detail::inf_norm(sigma_ss_inv);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_ss(sigma_ss);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_full(cov.sigma);
  if (eig_ss.info() != Eigen::Success || eig_full.info() != Eigen::Success)
    throw SingularSubmatrix("covariance eigendecomposition failed");
  out.c_min = eig_ss.eigenvalues().minCoeff();
  out.c_max = eig_full.eigenvalues().maxCoeff();
  return out;
}

/// Combined sample/population report for one realized design.
inline DesignConditionReport design_report(const Eigen::MatrixXd& X,
                                           const Covariance& cov,
                                           const std::vector<int>& support) {
  DesignConditionReport report;
  const auto [eps_sample, lam_min] = sample_incoherence(X, support);
  report.epsilon_sample = eps_sample;
  report.lambda_min_sample = lam_min;
  const PopulationConstants pop = population_constants(cov, support);
  report.epsilon_pop = pop.epsilon;
  report.c_min = pop.c_min;
  report.c_max = pop.c_max;
  report.d_max = pop.d_max;
  return report;
}

}  // namespace lpl
