#include "lpl/solver.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "lpl/ensemble.hpp"
#include "oracle.hpp"

using lpl::build_covariance;
using lpl::CovarianceSpec;
using lpl::kkt_residual;
using lpl::lasso_objective;
using lpl::LassoSolution;
using lpl::make_signal;
using lpl::observe;
using lpl::recovery_success;
using lpl::Rng;
using lpl::sample_design;
using lpl::sign_pattern;
using lpl::solve_lasso;
using lpl::SolverOptions;

namespace {

lpl::ProblemInstance random_instance(int n, int p, int s, double sigma2,
                                     double magnitude, std::uint64_t seed) {
  const auto cov = build_covariance(CovarianceSpec::identity(p));
  Rng rng(seed);
  const auto signal = make_signal(p, s, magnitude, rng);
  return observe(sample_design(cov, n, rng), signal, sigma2, rng);
}

}  // namespace

TEST(solve_lasso, large_lambda_gives_exact_zero) {
  const auto inst = random_instance(15, 6, 2, 0.25, 1.0, 101);
  const double lambda_max =
      (inst.X.transpose() * inst.y).cwiseAbs().maxCoeff() / inst.X.rows();
  const auto sol = solve_lasso(inst.X, inst.y, lambda_max * 1.000001);
  EXPECT_EQ(sol.beta_hat.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_TRUE(sol.converged);
  EXPECT_EQ(sol.kkt_residual, 0.0);
}

TEST(solve_lasso, identity_design_least_squares) {
  const Eigen::MatrixXd x = Eigen::MatrixXd::Identity(3, 3);
  Eigen::VectorXd y(3);
  y << 1.0, -2.0, 3.0;
  const auto sol = solve_lasso(x, y, 0.0);
  EXPECT_LT((sol.beta_hat - y).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_TRUE(sol.converged);
}

TEST(solve_lasso, underdetermined_least_squares_throws) {
  const auto inst = random_instance(4, 8, 2, 0.0, 1.0, 5);
  EXPECT_THROW(solve_lasso(inst.X, inst.y, 0.0), lpl::Underdetermined);
}

TEST(solve_lasso, matches_enumeration_oracle) {
  const std::vector<double> lambdas = {0.01, 0.1, 0.5};
  for (int k = 0; k < 30; ++k) {
    const auto inst = random_instance(20, 8, 3, 0.25, 1.0, 1000 + k);
    const double lambda = lambdas[k % lambdas.size()];
    const auto sol = solve_lasso(inst.X, inst.y, lambda);
    const auto ref = oracle::best_by_enumeration(inst.X, inst.y, lambda);
    ASSERT_TRUE(ref.found);
    EXPECT_LE(sol.objective, ref.objective + 1e-8) << "instance " << k;
    EXPECT_GE(sol.objective, ref.objective - 1e-8) << "instance " << k;
    EXPECT_LE(sol.kkt_residual, 1e-8);
  }
}

TEST(solve_lasso, reported_objective_matches_recompute) {
  for (int k = 0; k < 10; ++k) {
    const auto inst = random_instance(25, 10, 3, 0.5, 0.8, 2000 + k);
    const auto sol = solve_lasso(inst.X, inst.y, 0.1);
    const double recomputed =
        lasso_objective(inst.X, inst.y, 0.1, sol.beta_hat);
    EXPECT_LE(std::abs(sol.objective - recomputed),
              1e-12 * std::max(1.0, std::abs(recomputed)));
  }
}

TEST(solve_lasso, objective_nonincreasing_across_sweeps) {
  for (int k = 0; k < 5; ++k) {
    const auto inst = random_instance(30, 12, 4, 0.25, 1.0, 3000 + k);
    double previous = std::numeric_limits<double>::infinity();
    SolverOptions opts;
    opts.trace = [&](int, double objective, double) {
      EXPECT_LE(objective, previous + 1e-12);
      previous = objective;
    };
    solve_lasso(inst.X, inst.y, 0.05, opts);
  }
}

TEST(solve_lasso, scaling_invariance) {
  // Near-exact solves, so the comparison reflects the problem's
  // homogeneity rather than solver tolerance.
  SolverOptions tight;
  tight.tol_kkt = 1e-13;
  const auto inst = random_instance(20, 8, 3, 0.25, 1.0, 41);
  const double lambda = 0.1;
  const auto base = solve_lasso(inst.X, inst.y, lambda, tight);
  for (double c : {0.5, 3.0}) {
    const auto scaled = solve_lasso(inst.X, c * inst.y, c * lambda, tight);
    EXPECT_LT((scaled.beta_hat - c * base.beta_hat).cwiseAbs().maxCoeff(),
              1e-10 * std::max(1.0, c));
  }
}

TEST(solve_lasso, reports_nonconvergence_flag) {
  const auto inst = random_instance(40, 20, 5, 0.25, 1.0, 7);
  SolverOptions opts;
  opts.max_iters = 1;
  opts.tol_kkt = 1e-14;
  const auto sol = solve_lasso(inst.X, inst.y, 0.001, opts);
  EXPECT_FALSE(sol.converged);
  EXPECT_EQ(sol.iterations, 1);
  EXPECT_TRUE(sol.beta_hat.allFinite());
}

TEST(kkt_residual, zero_beta_cases) {
  const auto inst = random_instance(15, 5, 2, 0.25, 1.0, 91);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(5);
  const double lambda_max =
      (inst.X.transpose() * inst.y).cwiseAbs().maxCoeff() / inst.X.rows();
  EXPECT_EQ(kkt_residual(inst.X, inst.y, lambda_max, zero), 0.0);
  EXPECT_NEAR(kkt_residual(inst.X, inst.y, 0.0, zero), lambda_max, 1e-14);
}

TEST(kkt_residual, solver_output_is_stationary) {
  const auto inst = random_instance(25, 9, 3, 0.5, 1.0, 93);
  SolverOptions opts;
  opts.tol_kkt = 1e-10;
  const auto sol = solve_lasso(inst.X, inst.y, 0.2, opts);
  EXPECT_LE(kkt_residual(inst.X, inst.y, 0.2, sol.beta_hat), 1e-10);
}

TEST(sign_pattern, basic_and_thresholded) {
  Eigen::VectorXd beta(3);
  beta << 0.5, -0.2, 0.0;
  Eigen::VectorXi expected(3);
  expected << 1, -1, 0;
  EXPECT_EQ(sign_pattern(beta, 0.0), expected);

  Eigen::VectorXd near_zero(2);
  near_zero << 1e-9, 1.0;
  Eigen::VectorXi thresholded(2);
  thresholded << 0, 1;
  EXPECT_EQ(sign_pattern(near_zero, 1e-6), thresholded);
}

TEST(sign_pattern, nonzero_exactly_on_support) {
  Rng rng(8);
  const auto signal = make_signal(20, 6, 0.7, rng);
  const Eigen::VectorXi pattern = sign_pattern(signal.beta_star, 0.0);
  for (int i = 0; i < 20; ++i) {
    const bool on_support =
        std::find(signal.support.begin(), signal.support.end(), i) !=
        signal.support.end();
    EXPECT_EQ(pattern[i] != 0, on_support);
  }
}

TEST(recovery_success, detects_all_failure_modes) {
  Rng rng(12);
  const auto signal = make_signal(10, 3, 0.5, rng);
  EXPECT_TRUE(recovery_success(signal.beta_star, signal));

  Eigen::VectorXd flipped = signal.beta_star;
  flipped[signal.support[0]] = -flipped[signal.support[0]];
  EXPECT_FALSE(recovery_success(flipped, signal));

  const double tau = 1e-3;
  Eigen::VectorXd spurious = signal.beta_star;
  for (int i = 0; i < 10; ++i) {
    if (spurious[i] == 0.0) {
      spurious[i] = 2.0 * tau;
      break;
    }
  }
  EXPECT_FALSE(recovery_success(spurious, signal, tau));
  EXPECT_TRUE(recovery_success(signal.beta_star, signal, tau));

  Eigen::VectorXd wrong_size = Eigen::VectorXd::Zero(9);
  EXPECT_THROW(recovery_success(wrong_size, signal), lpl::DimensionMismatch);
}
