#pragma once

#include <Eigen/Dense>
#include <Eigen/QR>
#include <cmath>
#include <functional>
#include <string>

#include "lpl/ensemble.hpp"
#include "lpl/errors.hpp"

namespace lpl {

struct SolverOptions {
  double tol_kkt = 1e-8;
  int max_iters = 100000;    // full cyclic sweeps
  double zero_threshold = 0.0;
  /// Optional per-sweep observer: (sweep index, objective, kkt residual).
  std::function<void(int, double, double)> trace;
};

struct LassoSolution {
  Eigen::VectorXd beta_hat;
  double lambda = 0.0;
  double kkt_residual = 0.0;
  int iterations = 0;
  double objective = 0.0;
  bool converged = false;
};

/// (1/2n)||y - X beta||_2^2 + lambda ||beta||_1
inline double lasso_objective(const Eigen::MatrixXd& X,
                              const Eigen::VectorXd& y, double lambda,
                              const Eigen::VectorXd& beta) {
  const double n = static_cast<double>(X.rows());
  return (y - X * beta).squaredNorm() / (2.0 * n) +
         lambda * beta.lpNorm<1>();
}

namespace detail {

/// Worst-case violation of the stationarity condition
/// (1/n) X^T X beta - (1/n) X^T y + lambda z = 0 over valid subgradients z,
/// given the gradient g = (1/n) X^T (X beta - y).
inline double kkt_residual_from_gradient(const Eigen::VectorXd& gradient,
                                         double lambda,
                                         const Eigen::VectorXd& beta) {
  double worst = 0.0;
  for (int i = 0; i < beta.size(); ++i) {
    double violation;
    if (beta[i] != 0.0) {
      violation = std::abs(gradient[i] + lambda * (beta[i] > 0 ? 1.0 : -1.0));
    } else {
      violation = std::max(0.0, std::abs(gradient[i]) - lambda);
    }
    worst = std::max(worst, violation);
  }
  return worst;
}

inline double soft_threshold(double z, double lambda) {
  if (z > lambda) return z - lambda;
  if (z < -lambda) return z + lambda;
  return 0.0;
}

}  // namespace detail

/// Subgradient optimality residual at beta; zero iff beta is optimal.
inline double kkt_residual(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                           double lambda, const Eigen::VectorXd& beta) {
  if (X.rows() != y.size() || X.cols() != beta.size())
    throw DimensionMismatch("kkt_residual: shapes disagree");
  if (lambda < 0.0) throw ConfigError("lambda must be nonnegative");
  const double n = static_cast<double>(X.rows());
  const Eigen::VectorXd gradient = X.transpose() * (X * beta - y) / n;
  return detail::kkt_residual_from_gradient(gradient, lambda, beta);
}

/// Solves min (1/2n)||y - X beta||^2 + lambda ||beta||_1 by cyclic
/// coordinate descent with soft thresholding. Coordinates are updated in
/// index order against a maintained residual; convergence is declared on
/// the subgradient residual, recomputed from scratch before returning.
///
/// lambda == 0 falls back to least squares and requires n >= p with full
/// column rank (Underdetermined otherwise). Hitting max_iters returns the
/// best iterate with converged == false.
inline LassoSolution solve_lasso(const Eigen::MatrixXd& X,
                                 const Eigen::VectorXd& y, double lambda,
                                 const SolverOptions& opts = {}) {
  if (X.rows() != y.size())
    throw DimensionMismatch("solve_lasso: X rows != y length");
  if (lambda < 0.0) throw ConfigError("lambda must be nonnegative");
  if (opts.tol_kkt <= 0.0 || opts.max_iters < 1)
    throw ConfigError("invalid solver options");

  const int n = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());
  LassoSolution sol;
  sol.lambda = lambda;

  if (lambda == 0.0) {
    if (n < p)
      throw Underdetermined("lambda=0 requires n >= p (got n=" +
                            std::to_string(n) + ", p=" + std::to_string(p) +
                            ")");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < p)
      throw Underdetermined("lambda=0 requires full column rank");
    sol.beta_hat = qr.solve(y);
    sol.iterations = 0;
    sol.kkt_residual = kkt_residual(X, y, lambda, sol.beta_hat);
    sol.objective = lasso_objective(X, y, lambda, sol.beta_hat);
    sol.converged = sol.kkt_residual <= opts.tol_kkt;
    return sol;
  }

  const double n_real = static_cast<double>(n);
  Eigen::VectorXd col_scale(p);  // ||X_j||^2 / n
  for (int j = 0; j < p; ++j) col_scale[j] = X.col(j).squaredNorm() / n_real;

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd residual = y;  // y - X beta
  int sweep = 0;
  bool converged = false;

  for (sweep = 1; sweep <= opts.max_iters; ++sweep) {
    for (int j = 0; j < p; ++j) {
      if (col_scale[j] == 0.0) continue;  // dead column stays at zero
      const double correlation =
          X.col(j).dot(residual) / n_real + col_scale[j] * beta[j];
      const double updated =
          detail::soft_threshold(correlation, lambda) / col_scale[j];
      if (updated != beta[j]) {
        residual -= X.col(j) * (updated - beta[j]);
        beta[j] = updated;
      }
    }
    const Eigen::VectorXd gradient = -(X.transpose() * residual) / n_real;
    const double resid_kkt =
        detail::kkt_residual_from_gradient(gradient, lambda, beta);
    if (opts.trace)
      opts.trace(sweep, residual.squaredNorm() / (2.0 * n_real) +
                            lambda * beta.lpNorm<1>(),
                 resid_kkt);
    if (resid_kkt <= opts.tol_kkt) {
      // Confirm against a residual rebuilt from scratch so accumulated
      // drift in the maintained residual cannot fake convergence.
      if (kkt_residual(X, y, lambda, beta) <= opts.tol_kkt) {
        converged = true;
        break;
      }
      residual = y - X * beta;
    }
  }

  sol.beta_hat = std::move(beta);
  sol.iterations = std::min(sweep, opts.max_iters);
  sol.kkt_residual = kkt_residual(X, y, lambda, sol.beta_hat);
  sol.objective = lasso_objective(X, y, lambda, sol.beta_hat);
  sol.converged = converged;
  return sol;
}

/// Componentwise sign with a dead zone: 0 where |beta_i| <= tau.
inline Eigen::VectorXi sign_pattern(const Eigen::VectorXd& beta,
                                    double tau = 0.0) {
  Eigen::VectorXi pattern(beta.size());
  for (int i = 0; i < beta.size(); ++i) {
    if (std::abs(beta[i]) <= tau)
      pattern[i] = 0;
    else
      pattern[i] = beta[i] > 0.0 ? 1 : -1;
  }
  return pattern;
}

/// True iff the estimate reproduces the signed support of the truth.
inline bool recovery_success(const Eigen::VectorXd& beta_hat,
                             const SparseSignal& signal, double tau = 0.0) {
  if (beta_hat.size() != signal.beta_star.size())
    throw DimensionMismatch("recovery_success: lengths disagree");
  return sign_pattern(beta_hat, tau) == sign_pattern(signal.beta_star, 0.0);
}

}  // namespace lpl
