#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "lpl/conditions.hpp"
#include "lpl/covariance.hpp"
#include "lpl/errors.hpp"
#include "lpl/rng.hpp"
#include "lpl/theory.hpp"

namespace lpl {

/// Settings for the closed-form-vs-simulation checks. The support is the
/// first s coordinates of a p = s + off_support dimensional ensemble and
/// the sign vector is all ones; the closed forms are evaluated with the
/// same choices, so neither convention loses generality.
struct ValidateConfig {
  int n = 50;
  int s = 5;
  int off_support = 3;  // p - s; kept small so the covariance of the
                        // off-support variables can be resolved
  CovarianceSpec ensemble = CovarianceSpec::identity(0);
  double sigma2 = 0.25;
  double lambda = 0.3;
  int replicates = 20000;
  std::uint64_t seed = 7151;

  int p() const { return s + off_support; }
};

struct StatCheck {
  std::string name;
  bool pass = false;
  double statistic = 0.0;  // z-score or relative deviation, per check
  double limit = 0.0;
  std::string detail;
};

struct StatReport {
  std::vector<StatCheck> checks;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

namespace detail {

struct RunningMoments {
  double mean = 0.0;
  double m2 = 0.0;
  long long count = 0;
  void add(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / count;
    m2 += delta * (x - mean);
  }
  double variance() const { return count > 1 ? m2 / (count - 1) : 0.0; }
  double std_error() const {
    return count > 0 ? std::sqrt(variance() / count) : 0.0;
  }
};

inline StatCheck z_check(const std::string& name, double empirical,
                         double expected, double std_error) {
  StatCheck c;
  c.name = name;
  c.limit = 3.0;
  if (std_error == 0.0) {
    c.statistic = empirical == expected ? 0.0
                                        : std::numeric_limits<double>::infinity();
  } else {
    c.statistic = std::abs(empirical - expected) / std_error;
  }
  c.pass = c.statistic <= c.limit;
  c.detail = "empirical=" + std::to_string(empirical) +
             " expected=" + std::to_string(expected);
  return c;
}

inline StatCheck relative_check(const std::string& name, double empirical,
                                double expected, double limit) {
  StatCheck c;
  c.name = name;
  c.limit = limit;
  const double scale = std::abs(expected);
  if (scale == 0.0) {
    c.statistic = std::abs(empirical) == 0.0
                      ? 0.0
                      : std::numeric_limits<double>::infinity();
    c.pass = std::abs(empirical) <= 1e-15;
  } else {
    c.statistic = std::abs(empirical - expected) / scale;
    c.pass = c.statistic <= limit;
  }
  c.detail = "empirical=" + std::to_string(empirical) +
             " expected=" + std::to_string(expected);
  return c;
}

/// Entrywise comparison of an empirical matrix against a closed form;
/// deviations are measured relative to the largest entry of the target so
/// structurally-zero entries are still constrained.
inline StatCheck matrix_check(const std::string& name,
                              const Eigen::MatrixXd& empirical,
                              const Eigen::MatrixXd& expected, double limit) {
  StatCheck c;
  c.name = name;
  c.limit = limit;
  const double scale = expected.cwiseAbs().maxCoeff();
  const double worst = (empirical - expected).cwiseAbs().maxCoeff();
  if (scale == 0.0) {
    c.statistic = worst == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    c.pass = worst <= 1e-15;
  } else {
    c.statistic = worst / scale;
    c.pass = c.statistic <= limit;
  }
  c.detail = "max entry deviation " + std::to_string(worst);
  return c;
}

}  // namespace detail

/// Monte Carlo validation of the closed-form moments against direct
/// simulation: the covariance scale factor (mean and variance), the
/// conditional moments of the support-shift variables, the inverse
/// Wishart mean, and the conditional mean/covariance of the off-support
/// variables under resampling. All draws are seeded; the report is
/// deterministic.
inline StatReport validate_statistics(const ValidateConfig& config) {
  if (config.n <= config.s + 3)
    throw InsufficientDof("validation requires n > s + 3");
  if (config.replicates < 2) throw ConfigError("need at least 2 replicates");
  const int n = config.n;
  const int s = config.s;
  const int reps = config.replicates;
  const double sigma = std::sqrt(config.sigma2);
  const double lambda = config.lambda;

  const Covariance cov = build_covariance(config.ensemble.with_dim(config.p()));
  std::vector<int> support(s);
  for (int i = 0; i < s; ++i) support[i] = i;
  const std::vector<int> off = detail::complement(config.p(), support);

  const Eigen::MatrixXd sigma_ss =
      detail::select_block(cov.sigma, support, support);
  const Eigen::MatrixXd sigma_off_s =
      detail::select_block(cov.sigma, off, support);
  const Eigen::MatrixXd sigma_off_off =
      detail::select_block(cov.sigma, off, off);
  const Eigen::LLT<Eigen::MatrixXd> sigma_ss_llt(sigma_ss);
  if (sigma_ss_llt.info() != Eigen::Success)
    throw SingularSubmatrix("Sigma_SS is not positive definite");
  const Eigen::MatrixXd sigma_ss_inv =
      sigma_ss_llt.solve(Eigen::MatrixXd::Identity(s, s));
  const Eigen::MatrixXd chol_ss = sigma_ss_llt.matrixL();
  const Eigen::VectorXd b_vec = Eigen::VectorXd::Ones(s);
  const double quad_form = b_vec.dot(sigma_ss_inv * b_vec);

  Rng rng(mix_seed({config.seed, 0x76616c6964617465ULL}));

  // Pass 1: resample (X_S, W), accumulate the scale factor, the
  // conditional moments of u, and the inverse of the support Gram matrix.
  detail::RunningMoments scale_moments;
  std::vector<detail::RunningMoments> cond_mean(s), cond_var(s);
  Eigen::MatrixXd invw_sum = Eigen::MatrixXd::Zero(s, s);
  Eigen::MatrixXd invw_sumsq = Eigen::MatrixXd::Zero(s, s);

  Eigen::MatrixXd z(n, s);
  Eigen::VectorXd w(n);
  for (int rep = 0; rep < reps; ++rep) {
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < s; ++j) z(k, j) = rng.normal();
    const Eigen::MatrixXd xs =
        cov.is_identity() ? z : Eigen::MatrixXd(z * chol_ss.transpose());
    for (int k = 0; k < n; ++k) w[k] = sigma * rng.normal();

    const Eigen::MatrixXd gram = xs.transpose() * xs;
    const Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success) continue;  // measure-zero event
    const Eigen::MatrixXd gram_inv =
        llt.solve(Eigen::MatrixXd::Identity(s, s));
    const Eigen::VectorXd xtw = xs.transpose() * w;

    const double scale =
        lambda * lambda * b_vec.dot(gram_inv * b_vec) +
        (w.squaredNorm() - xtw.dot(gram_inv * xtw)) / (double(n) * n);
    scale_moments.add(scale);

    const Eigen::VectorXd cm = -lambda * n * (gram_inv * b_vec);
    for (int i = 0; i < s; ++i) {
      cond_mean[i].add(cm[i]);
      cond_var[i].add(config.sigma2 * n * gram_inv(i, i));
    }
    invw_sum += gram_inv;
    invw_sumsq += gram_inv.cwiseAbs2();
  }

  StatReport report;
  const CovScaleMoments closed =
      cov_scale_moments(lambda, n, s, config.sigma2, quad_form);
  report.checks.push_back(detail::z_check(
      "cov_scale_mean", scale_moments.mean, closed.mean,
      scale_moments.std_error()));
  report.checks.push_back(detail::relative_check(
      "cov_scale_variance", scale_moments.variance(), closed.variance, 0.10));

  double worst_mean_z = 0.0, worst_var_z = 0.0;
  int worst_mean_i = 0, worst_var_i = 0;
  for (int i = 0; i < s; ++i) {
    const UConditionalMoments um = u_conditional_moments(
        lambda, n, s, config.sigma2, sigma_ss_inv, b_vec, i);
    const double zm = detail::z_check("", cond_mean[i].mean,
                                      um.mean_of_cond_mean,
                                      cond_mean[i].std_error())
                          .statistic;
    const double zv =
        detail::z_check("", cond_var[i].mean, um.mean_of_cond_var,
                        cond_var[i].std_error())
            .statistic;
    if (zm > worst_mean_z) { worst_mean_z = zm; worst_mean_i = i; }
    if (zv > worst_var_z) { worst_var_z = zv; worst_var_i = i; }
  }
  StatCheck mean_check;
  mean_check.name = "u_cond_mean";
  mean_check.statistic = worst_mean_z;
  mean_check.limit = 3.0;
  mean_check.pass = worst_mean_z <= 3.0;
  mean_check.detail = "worst coordinate " + std::to_string(worst_mean_i);
  report.checks.push_back(mean_check);
  StatCheck var_check;
  var_check.name = "u_cond_variance";
  var_check.statistic = worst_var_z;
  var_check.limit = 3.0;
  var_check.pass = worst_var_z <= 3.0;
  var_check.detail = "worst coordinate " + std::to_string(worst_var_i);
  report.checks.push_back(var_check);

  report.checks.push_back(detail::matrix_check(
      "inverse_wishart_mean", invw_sum / reps,
      inverse_wishart_mean(sigma_ss, n), 0.05));

  // Pass 2: hold one (X_S, W) fixed and resample the off-support columns
  // conditionally; the off-support variables v must match the predicted
  // conditional mean and covariance.
  {
    const int n_off = config.off_support;
    Rng rng2(mix_seed({config.seed, 0x636f6e645f636f76ULL}));
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < s; ++j) z(k, j) = rng2.normal();
    const Eigen::MatrixXd xs =
        cov.is_identity() ? z : Eigen::MatrixXd(z * chol_ss.transpose());
    for (int k = 0; k < n; ++k) w[k] = sigma * rng2.normal();

    const Eigen::MatrixXd gram = xs.transpose() * xs;
    const Eigen::LLT<Eigen::MatrixXd> llt(gram);
    const Eigen::VectorXd t =
        llt.solve(xs.transpose() * w / double(n) - lambda * b_vec);
    const Eigen::VectorXd fixed_dir = w / double(n) - xs * t;  // v = X_off^T fixed_dir
    const double scale_fixed =
        lambda * lambda *
            b_vec.dot(llt.solve(Eigen::MatrixXd::Identity(s, s)) * b_vec) +
        (w.squaredNorm() -
         (xs.transpose() * w).dot(llt.solve(xs.transpose() * w))) /
            (double(n) * n);

    // conditional law of an off-support row block given the support block
    const Eigen::MatrixXd regress = sigma_ss_llt.solve(sigma_off_s.transpose());
    const Eigen::MatrixXd cond_cov =
        sigma_off_off - sigma_off_s * sigma_ss_llt.solve(sigma_off_s.transpose());
    Eigen::LLT<Eigen::MatrixXd> cond_llt(cond_cov);
    if (cond_llt.info() != Eigen::Success)
      throw SingularSubmatrix("conditional covariance is not positive definite");
    const Eigen::MatrixXd cond_chol = cond_llt.matrixL();
    const Eigen::MatrixXd conditional_mean_part = xs * regress;

    Eigen::VectorXd v_sum = Eigen::VectorXd::Zero(n_off);
    Eigen::MatrixXd v_outer = Eigen::MatrixXd::Zero(n_off, n_off);
    std::vector<detail::RunningMoments> v_coord(n_off);
    Eigen::MatrixXd zoff(n, n_off);
    for (int rep = 0; rep < reps; ++rep) {
      for (int k = 0; k < n; ++k)
        for (int j = 0; j < n_off; ++j) zoff(k, j) = rng2.normal();
      const Eigen::MatrixXd xoff =
          conditional_mean_part + zoff * cond_chol.transpose();
      const Eigen::VectorXd v = xoff.transpose() * fixed_dir;
      v_sum += v;
      v_outer += v * v.transpose();
      for (int j = 0; j < n_off; ++j) v_coord[j].add(v[j]);
    }
    const Eigen::VectorXd v_mean = v_sum / reps;
    const Eigen::MatrixXd v_cov =
        (v_outer - reps * v_mean * v_mean.transpose()) / (reps - 1);

    report.checks.push_back(detail::matrix_check(
        "v_conditional_covariance", v_cov, scale_fixed * cond_cov, 0.05));

    // exact conditional mean: lambda Sigma_ScS Sigma_SS^-1 b
    const Eigen::VectorXd exact_mean =
        lambda * (sigma_off_s * (sigma_ss_inv * b_vec));
    double worst_z = 0.0;
    for (int j = 0; j < n_off; ++j) {
      const double zj =
          detail::z_check("", v_coord[j].mean, exact_mean[j],
                          v_coord[j].std_error())
              .statistic;
      worst_z = std::max(worst_z, zj);
    }
    StatCheck vmean;
    vmean.name = "v_conditional_mean";
    vmean.statistic = worst_z;
    vmean.limit = 3.0;
    vmean.pass = worst_z <= 3.0;
    vmean.detail = "against exact conditional mean";
    report.checks.push_back(vmean);

    // population incoherence bound on the same mean, with additive
    // allowance for Monte Carlo noise
    const PopulationConstants pop = population_constants(cov, support);
    double worst_excess = -std::numeric_limits<double>::infinity();
    bool bound_ok = true;
    for (int j = 0; j < n_off; ++j) {
      const double allowance =
          lambda * (1.0 - pop.epsilon) + 3.0 * v_coord[j].std_error();
      const double excess = std::abs(v_coord[j].mean) - allowance;
      worst_excess = std::max(worst_excess, excess);
      if (excess > 0.0) bound_ok = false;
    }
    StatCheck vbound;
    vbound.name = "v_mean_incoherence_bound";
    vbound.statistic = worst_excess;
    vbound.limit = 0.0;
    vbound.pass = bound_ok;
    vbound.detail = "|mean v_j| <= lambda (1 - epsilon) + 3 se";
    report.checks.push_back(vbound);
  }

  return report;
}

}  // namespace lpl
