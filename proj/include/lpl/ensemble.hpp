#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "lpl/covariance.hpp"
#include "lpl/errors.hpp"
#include "lpl/rng.hpp"

namespace lpl {

/// Ground-truth sparse coefficient vector.
struct SparseSignal {
  Eigen::VectorXd beta_star;
  std::vector<int> support;  // sorted indices of the nonzero entries
  double rho_min = 0.0;      // smallest |beta*_i| over the support

  int dim() const { return static_cast<int>(beta_star.size()); }
  int sparsity() const { return static_cast<int>(support.size()); }
};

/// One sampled regression problem: design, noise, observations.
struct ProblemInstance {
  Eigen::MatrixXd X;
  Eigen::VectorXd noise;
  Eigen::VectorXd y;
  double sigma2 = 0.0;
  SparseSignal signal;
  CovarianceSpec covariance;
};

/// Draws an n x p design whose rows are i.i.d. N(0, Sigma). Each row is
/// chol * z with z standard normal; the standard normals are drawn in
/// row-major order, so output is bit-stable for a given seed.
inline Eigen::MatrixXd sample_design(const Covariance& cov, int n, Rng& rng) {
  if (n < 1) throw ConfigError("sample_design requires n >= 1");
  const int p = cov.dim();
  Eigen::MatrixXd z(n, p);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < p; ++j) z(k, j) = rng.normal();
  if (cov.is_identity()) return z;
  return z * cov.chol.transpose();
}

/// Rescales every column to squared norm n (the deterministic-design
/// normalization). Throws ZeroColumn if any column vanishes.
inline Eigen::MatrixXd normalize_columns(const Eigen::MatrixXd& X) {
  const int n = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());
  Eigen::MatrixXd out(n, p);
  for (int j = 0; j < p; ++j) {
    const double norm = X.col(j).norm();
    if (norm == 0.0)
      throw ZeroColumn("column " + std::to_string(j) + " is identically zero");
    out.col(j) = X.col(j) * (std::sqrt(static_cast<double>(n)) / norm);
  }
  return out;
}

/// Sparse vector with s nonzero entries of magnitude b and independent
/// fair signs, support chosen uniformly without replacement.
inline SparseSignal make_signal(int p, int s, double magnitude, Rng& rng) {
  if (s < 1 || s >= p)
    throw InvalidSparsity("sparsity must satisfy 1 <= s < p, got s=" +
                          std::to_string(s) + " p=" + std::to_string(p));
  if (!(magnitude > 0.0))
    throw ConfigError("signal magnitude must be positive");

  // Partial Fisher-Yates: the first s slots become the support.
  std::vector<int> indices(p);
  std::iota(indices.begin(), indices.end(), 0);
  for (int k = 0; k < s; ++k) {
    const int swap_with =
        k + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(p - k)));
    std::swap(indices[k], indices[swap_with]);
  }
  SparseSignal signal;
  signal.support.assign(indices.begin(), indices.begin() + s);
  std::sort(signal.support.begin(), signal.support.end());
  signal.beta_star = Eigen::VectorXd::Zero(p);
  for (int idx : signal.support)
    signal.beta_star[idx] = magnitude * static_cast<double>(rng.sign());
  signal.rho_min = magnitude;
  return signal;
}

/// Forms y = X beta* + w with w i.i.d. N(0, sigma2). With sigma2 == 0 the
/// noise vector is exactly zero (no draws are consumed).
inline ProblemInstance observe(Eigen::MatrixXd X, const SparseSignal& signal,
                               double sigma2, Rng& rng) {
  if (static_cast<int>(X.cols()) != signal.dim())
    throw DimensionMismatch("design has " + std::to_string(X.cols()) +
                            " columns but signal has dimension " +
                            std::to_string(signal.dim()));
  if (sigma2 < 0.0) throw ConfigError("sigma2 must be nonnegative");
  const int n = static_cast<int>(X.rows());
  ProblemInstance inst;
  inst.sigma2 = sigma2;
  inst.signal = signal;
  if (sigma2 == 0.0) {
    inst.noise = Eigen::VectorXd::Zero(n);
  } else {
    const double sigma = std::sqrt(sigma2);
    inst.noise.resize(n);
    for (int k = 0; k < n; ++k) inst.noise[k] = sigma * rng.normal();
  }
  inst.y = X * signal.beta_star + inst.noise;
  inst.X = std::move(X);
  return inst;
}

enum class SparsityRegime { linear, sublinear, fractional_power };

inline std::string regime_name(SparsityRegime regime) {
  switch (regime) {
    case SparsityRegime::linear: return "linear";
    case SparsityRegime::sublinear: return "sublinear";
    case SparsityRegime::fractional_power: return "fractional_power";
  }
  return "unknown";
}

/// Sparsity index s(p) for the three growth regimes. All logarithms are
/// natural; rounding is half away from zero. Throws DegenerateRegime when
/// the result falls outside [1, p-1].
inline int sparsity_index(SparsityRegime regime, int p, double alpha,
                          double gamma) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ConfigError("alpha must lie in (0,1)");
  if (!(gamma > 0.0 && gamma < 1.0))
    throw ConfigError("gamma must lie in (0,1)");
  double raw = 0.0;
  switch (regime) {
    case SparsityRegime::linear:
      raw = alpha * p;
      break;
    case SparsityRegime::sublinear: {
      const double ap = alpha * p;
      if (ap <= 1.0)
        throw DegenerateRegime("sublinear regime needs alpha*p > 1");
      raw = ap / std::log(ap);
      break;
    }
    case SparsityRegime::fractional_power:
      raw = alpha * std::pow(static_cast<double>(p), gamma);
      break;
  }
  const long long s = std::llround(raw);
  if (s < 1 || s >= p)
    throw DegenerateRegime("sparsity index " + std::to_string(s) +
                           " outside [1, p-1] for p=" + std::to_string(p));
  return static_cast<int>(s);
}

}  // namespace lpl
