// Test-only brute-force reference for the l1 quadratic program. For every
// sign/zero pattern over the p coordinates it solves the restricted
// stationarity system, keeps the candidates whose signs and off-pattern
// subgradients are admissible, and returns the best objective found.
// Exponential in p; intended for p <= 10. Kept independent of the library
// solver: only dense linear solves and its own objective evaluation.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace oracle {

struct Candidate {
  Eigen::VectorXd beta;
  double objective = std::numeric_limits<double>::infinity();
  bool found = false;
};

inline double objective_of(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                           double lambda, const Eigen::VectorXd& beta) {
  const double n = static_cast<double>(X.rows());
  double l1 = 0.0;
  for (int i = 0; i < beta.size(); ++i) l1 += std::abs(beta[i]);
  return (y - X * beta).squaredNorm() / (2.0 * n) + lambda * l1;
}

inline Candidate best_by_enumeration(const Eigen::MatrixXd& X,
                                     const Eigen::VectorXd& y, double lambda,
                                     double feas_tol = 1e-9) {
  const int p = static_cast<int>(X.cols());
  const double n = static_cast<double>(X.rows());
  const Eigen::MatrixXd gram = X.transpose() * X;
  const Eigen::VectorXd xty = X.transpose() * y;

  Candidate best;
  std::vector<int> pattern(p, -1);  // ternary counter over {-1, 0, +1}
  for (;;) {
    std::vector<int> free_set;
    for (int i = 0; i < p; ++i)
      if (pattern[i] != 0) free_set.push_back(i);

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    bool admissible = true;
    if (!free_set.empty()) {
      const int f = static_cast<int>(free_set.size());
      Eigen::MatrixXd gram_ff(f, f);
      Eigen::VectorXd rhs(f);
      for (int a = 0; a < f; ++a) {
        for (int b = 0; b < f; ++b)
          gram_ff(a, b) = gram(free_set[a], free_set[b]);
        rhs[a] = xty[free_set[a]] - n * lambda * pattern[free_set[a]];
      }
      const Eigen::VectorXd beta_f =
          gram_ff.colPivHouseholderQr().solve(rhs);
      for (int a = 0; a < f && admissible; ++a) {
        if (beta_f[a] * pattern[free_set[a]] <= 0.0) admissible = false;
      }
      if (admissible)
        for (int a = 0; a < f; ++a) beta[free_set[a]] = beta_f[a];
    }
    if (admissible) {
      const Eigen::VectorXd gradient = (gram * beta - xty) / n;
      for (int i = 0; i < p && admissible; ++i) {
        if (pattern[i] == 0 && std::abs(gradient[i]) > lambda + feas_tol)
          admissible = false;
      }
    }
    if (admissible) {
      const double obj = objective_of(X, y, lambda, beta);
      if (!best.found || obj < best.objective) {
        best.found = true;
        best.objective = obj;
        best.beta = beta;
      }
    }

    int pos = 0;  // advance the ternary counter
    while (pos < p && pattern[pos] == 1) pattern[pos++] = -1;
    if (pos == p) break;
    ++pattern[pos];
  }
  return best;
}

}  // namespace oracle
