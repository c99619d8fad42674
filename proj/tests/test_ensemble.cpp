#include "lpl/ensemble.hpp"

#include <gtest/gtest.h>

#include <cmath>

using lpl::build_covariance;
using lpl::CovarianceSpec;
using lpl::make_signal;
using lpl::normalize_columns;
using lpl::observe;
using lpl::Rng;
using lpl::sample_design;
using lpl::SparsityRegime;
using lpl::sparsity_index;

TEST(sample_design, deterministic_given_seed) {
  const auto cov = build_covariance(CovarianceSpec::identity(2));
  Rng a(7), b(7);
  const Eigen::MatrixXd x1 = sample_design(cov, 3, a);
  const Eigen::MatrixXd x2 = sample_design(cov, 3, b);
  EXPECT_EQ(x1, x2);
}

TEST(sample_design, column_variance_near_one) {
  const auto cov = build_covariance(CovarianceSpec::identity(1));
  Rng rng(1);
  const Eigen::MatrixXd x = sample_design(cov, 10000, rng);
  const double mean = x.col(0).mean();
  const double var =
      (x.col(0).array() - mean).square().sum() / (x.rows() - 1);
  EXPECT_GE(var, 0.95);
  EXPECT_LE(var, 1.05);
}

TEST(sample_design, toeplitz_cross_correlation) {
  const auto cov = build_covariance(CovarianceSpec::toeplitz(2, 0.5));
  Rng rng(11);
  const Eigen::MatrixXd x = sample_design(cov, 10000, rng);
  const Eigen::VectorXd a = x.col(0).array() - x.col(0).mean();
  const Eigen::VectorXd b = x.col(1).array() - x.col(1).mean();
  const double corr = a.dot(b) / std::sqrt(a.squaredNorm() * b.squaredNorm());
  EXPECT_NEAR(corr, 0.5, 0.03);
}

TEST(sample_design, empirical_covariance_matches_sigma) {
  for (const auto& spec : {CovarianceSpec::identity(4),
                           CovarianceSpec::toeplitz(3, 0.5),
                           CovarianceSpec::toeplitz(4, -0.4)}) {
    const auto cov = build_covariance(spec);
    Rng rng(77);
    const int n = 20000;
    const Eigen::MatrixXd x = sample_design(cov, n, rng);
    const Eigen::MatrixXd emp = x.transpose() * x / double(n);
    EXPECT_LE((emp - cov.sigma).cwiseAbs().maxCoeff(), 0.05)
        << "dim=" << spec.dim;
  }
}

TEST(normalize_columns, forces_squared_norm_n) {
  Eigen::MatrixXd x(2, 1);
  x << 3.0, 4.0;
  const Eigen::MatrixXd out = normalize_columns(x);
  EXPECT_NEAR(out.col(0).squaredNorm(), 2.0, 1e-12);
  EXPECT_NEAR(out(0, 0), 3.0 * std::sqrt(2.0) / 5.0, 1e-12);
  EXPECT_NEAR(out(1, 0), 4.0 * std::sqrt(2.0) / 5.0, 1e-12);
}

TEST(normalize_columns, idempotent_and_general) {
  Rng rng(3);
  Eigen::MatrixXd x(5, 3);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 3; ++j) x(i, j) = rng.normal();
  const Eigen::MatrixXd once = normalize_columns(x);
  for (int j = 0; j < 3; ++j)
    EXPECT_NEAR(once.col(j).squaredNorm(), 5.0, 5.0 * 1e-12);
  const Eigen::MatrixXd twice = normalize_columns(once);
  EXPECT_LE((twice - once).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(normalize_columns, rejects_zero_column) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(3, 2);
  x(0, 0) = 1.0;
  EXPECT_THROW(normalize_columns(x), lpl::ZeroColumn);
}

TEST(make_signal, constructs_requested_sparsity) {
  Rng rng(17);
  const auto signal = make_signal(5, 4, 0.5, rng);
  EXPECT_EQ(signal.sparsity(), 4);
  EXPECT_EQ(signal.rho_min, 0.5);
  int zeros = 0;
  for (int i = 0; i < 5; ++i) {
    if (signal.beta_star[i] == 0.0)
      ++zeros;
    else
      EXPECT_EQ(std::abs(signal.beta_star[i]), 0.5);
  }
  EXPECT_EQ(zeros, 1);
  EXPECT_TRUE(std::is_sorted(signal.support.begin(), signal.support.end()));

  const auto single = make_signal(10, 1, 1.0, rng);
  EXPECT_EQ(single.sparsity(), 1);
  EXPECT_EQ(std::abs(single.beta_star[single.support[0]]), 1.0);
}

TEST(make_signal, sign_balance) {
  Rng rng(19);
  const auto signal = make_signal(1000, 500, 1.0, rng);
  int positive = 0;
  for (int idx : signal.support) positive += signal.beta_star[idx] > 0.0;
  const double fraction = positive / 500.0;
  EXPECT_GE(fraction, 0.45);
  EXPECT_LE(fraction, 0.55);
}

TEST(make_signal, rejects_bad_sparsity) {
  Rng rng(1);
  EXPECT_THROW(make_signal(5, 5, 1.0, rng), lpl::InvalidSparsity);
  EXPECT_THROW(make_signal(5, 0, 1.0, rng), lpl::InvalidSparsity);
}

TEST(observe, zero_noise_is_exact) {
  const auto cov = build_covariance(CovarianceSpec::identity(6));
  Rng rng(23);
  const auto signal = make_signal(6, 2, 0.5, rng);
  const Eigen::MatrixXd x = sample_design(cov, 9, rng);
  const auto inst = observe(x, signal, 0.0, rng);
  EXPECT_EQ((inst.y - x * signal.beta_star).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(inst.noise.cwiseAbs().maxCoeff(), 0.0);
}

TEST(observe, pure_noise_variance) {
  lpl::SparseSignal null_signal;
  null_signal.beta_star = Eigen::VectorXd::Zero(2);
  null_signal.rho_min = 0.0;
  const auto cov = build_covariance(CovarianceSpec::identity(2));
  Rng rng(29);
  const Eigen::MatrixXd x = sample_design(cov, 10000, rng);
  const auto inst = observe(x, null_signal, 1.0, rng);
  const double mean = inst.y.mean();
  const double var =
      (inst.y.array() - mean).square().sum() / (inst.y.size() - 1);
  EXPECT_GE(var, 0.95);
  EXPECT_LE(var, 1.05);
}

TEST(observe, deterministic_noise) {
  const auto cov = build_covariance(CovarianceSpec::identity(3));
  Rng setup(31);
  const auto signal = make_signal(3, 1, 1.0, setup);
  const Eigen::MatrixXd x = sample_design(cov, 20, setup);
  Rng r1(55), r2(55);
  const auto a = observe(x, signal, 0.25, r1);
  const auto b = observe(x, signal, 0.25, r2);
  EXPECT_EQ(a.noise, b.noise);
  EXPECT_EQ(a.y, b.y);
}

TEST(observe, dimension_mismatch) {
  const auto cov = build_covariance(CovarianceSpec::identity(3));
  Rng rng(1);
  const auto signal = make_signal(4, 1, 1.0, rng);
  const Eigen::MatrixXd x = sample_design(cov, 5, rng);
  EXPECT_THROW(observe(x, signal, 0.0, rng), lpl::DimensionMismatch);
}

TEST(sparsity_index, matches_hand_values) {
  EXPECT_EQ(sparsity_index(SparsityRegime::fractional_power, 256, 0.40, 0.75),
            26);
  EXPECT_EQ(sparsity_index(SparsityRegime::linear, 128, 0.40, 0.75), 51);
  EXPECT_EQ(sparsity_index(SparsityRegime::sublinear, 128, 0.40, 0.75), 13);
  EXPECT_EQ(sparsity_index(SparsityRegime::fractional_power, 128, 0.40, 0.75),
            15);
}

TEST(sparsity_index, monotone_in_p) {
  for (const auto regime : {SparsityRegime::linear, SparsityRegime::sublinear,
                            SparsityRegime::fractional_power}) {
    int previous = 0;
    for (int p = 64; p <= 4096; ++p) {
      const int s = sparsity_index(regime, p, 0.40, 0.75);
      EXPECT_GE(s, previous) << "regime=" << lpl::regime_name(regime)
                             << " p=" << p;
      previous = s;
    }
  }
}

TEST(sparsity_index, degenerate_regimes_throw) {
  EXPECT_THROW(sparsity_index(SparsityRegime::linear, 4, 0.05, 0.5),
               lpl::DegenerateRegime);
}
