#include "lpl/covariance.hpp"

#include <gtest/gtest.h>

#include "lpl/rng.hpp"

using lpl::build_covariance;
using lpl::Covariance;
using lpl::CovarianceSpec;

TEST(covariance, identity_is_exact) {
  const Covariance cov = build_covariance(CovarianceSpec::identity(4));
  EXPECT_TRUE(cov.sigma.isIdentity(0.0));
  EXPECT_TRUE(cov.chol.isIdentity(0.0));
  EXPECT_TRUE(cov.is_identity());
}

TEST(covariance, toeplitz_entries_follow_power_law) {
  const Covariance cov = build_covariance(CovarianceSpec::toeplitz(3, 0.1));
  Eigen::MatrixXd expected(3, 3);
  expected << 1.0, 0.1, 0.01, 0.1, 1.0, 0.1, 0.01, 0.1, 1.0;
  EXPECT_LT((cov.sigma - expected).cwiseAbs().maxCoeff(), 1e-15);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(cov.sigma(i, i), 1.0);
}

TEST(covariance, custom_two_by_two_cholesky) {
  Eigen::MatrixXd sigma(2, 2);
  sigma << 2.0, 1.0, 1.0, 2.0;
  const Covariance cov = build_covariance(CovarianceSpec::custom_matrix(sigma));
  EXPECT_NEAR(cov.chol(0, 0), 1.41421, 1e-5);
  EXPECT_NEAR(cov.chol(0, 1), 0.0, 0.0);
  EXPECT_NEAR(cov.chol(1, 0), 0.70711, 1e-5);
  EXPECT_NEAR(cov.chol(1, 1), 1.22474, 1e-5);
}

TEST(covariance, rejects_bad_inputs) {
  EXPECT_THROW(build_covariance(CovarianceSpec::toeplitz(4, 1.0)),
               lpl::InvalidRho);
  EXPECT_THROW(build_covariance(CovarianceSpec::toeplitz(4, -1.2)),
               lpl::InvalidRho);
  Eigen::MatrixXd indefinite(2, 2);
  indefinite << 1.0, 2.0, 2.0, 1.0;
  EXPECT_THROW(build_covariance(CovarianceSpec::custom_matrix(indefinite)),
               lpl::NotPositiveDefinite);
  Eigen::MatrixXd asym(2, 2);
  asym << 1.0, 0.5, 0.2, 1.0;
  EXPECT_THROW(build_covariance(CovarianceSpec::custom_matrix(asym)),
               lpl::NotPositiveDefinite);
}

// Reconstruction property over a batch of specs, including random SPD
// matrices: ||L L^T - Sigma||_max <= 1e-10 ||Sigma||_max.
TEST(covariance, cholesky_reconstruction_error_is_tiny) {
  std::vector<CovarianceSpec> specs;
  specs.push_back(CovarianceSpec::identity(1));
  specs.push_back(CovarianceSpec::identity(16));
  for (double rho : {-0.9, -0.5, 0.1, 0.5, 0.9})
    for (int p : {2, 8, 64}) specs.push_back(CovarianceSpec::toeplitz(p, rho));

  lpl::Rng rng(123);
  for (int p : {2, 5, 12}) {
    Eigen::MatrixXd a(p, p);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j) a(i, j) = rng.normal();
    Eigen::MatrixXd spd = a.transpose() * a +
                          0.5 * Eigen::MatrixXd::Identity(p, p);
    spd = (spd + spd.transpose()) / 2.0;
    specs.push_back(CovarianceSpec::custom_matrix(spd));
  }

  for (const auto& spec : specs) {
    const Covariance cov = build_covariance(spec);
    const double err =
        (cov.chol * cov.chol.transpose() - cov.sigma).cwiseAbs().maxCoeff();
    EXPECT_LE(err, 1e-10 * cov.sigma.cwiseAbs().maxCoeff())
        << "kind=" << static_cast<int>(spec.kind) << " dim=" << spec.dim;
  }
}

TEST(covariance, with_dim_reinstantiates_families_only) {
  const CovarianceSpec toe = CovarianceSpec::toeplitz(0, 0.3);
  EXPECT_EQ(toe.with_dim(7).dim, 7);
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(3, 3);
  const CovarianceSpec fixed = CovarianceSpec::custom_matrix(sigma);
  EXPECT_NO_THROW(fixed.with_dim(3));
  EXPECT_THROW(fixed.with_dim(5), lpl::ConfigError);
}
