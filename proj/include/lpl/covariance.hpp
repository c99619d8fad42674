#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <utility>

#include "lpl/errors.hpp"

namespace lpl {

enum class CovKind { identity, toeplitz, custom };

/// Description of a population covariance for the row distribution of the
/// design matrix. Toeplitz uses entries rho^|i-j|; custom takes any SPD
/// matrix with the dimension implied by the matrix itself.
struct CovarianceSpec {
  CovKind kind = CovKind::identity;
  int dim = 0;
  double rho = 0.0;          // toeplitz only
  Eigen::MatrixXd custom;    // custom only

  static CovarianceSpec identity(int p) {
    CovarianceSpec spec;
    spec.kind = CovKind::identity;
    spec.dim = p;
    return spec;
  }

  static CovarianceSpec toeplitz(int p, double rho) {
    CovarianceSpec spec;
    spec.kind = CovKind::toeplitz;
    spec.dim = p;
    spec.rho = rho;
    return spec;
  }

  static CovarianceSpec custom_matrix(Eigen::MatrixXd sigma) {
    CovarianceSpec spec;
    spec.kind = CovKind::custom;
    spec.dim = static_cast<int>(sigma.rows());
    spec.custom = std::move(sigma);
    return spec;
  }

  /// Same spec re-instantiated at another dimension (identity/toeplitz
  /// families only; a custom matrix is pinned to its own size).
  CovarianceSpec with_dim(int p) const {
    if (kind == CovKind::custom) {
      if (p != dim)
        throw ConfigError("custom covariance cannot be resized to p=" +
                          std::to_string(p));
      return *this;
    }
    CovarianceSpec spec = *this;
    spec.dim = p;
    return spec;
  }
};

/// Realized covariance: the matrix and its lower Cholesky factor.
struct Covariance {
  Eigen::MatrixXd sigma;
  Eigen::MatrixXd chol;  // lower triangular, chol * chol^T == sigma

  int dim() const { return static_cast<int>(sigma.rows()); }
  bool is_identity() const { return identity_flag; }
  bool identity_flag = false;
};

/// Builds the covariance matrix and its Cholesky factor.
/// Throws InvalidRho if |rho| >= 1, NotPositiveDefinite if a custom
/// matrix is not symmetric positive definite.
inline Covariance build_covariance(const CovarianceSpec& spec) {
  if (spec.dim < 1) throw ConfigError("covariance dimension must be >= 1");
  const int p = spec.dim;
  Covariance cov;
  switch (spec.kind) {
    case CovKind::identity:
      cov.sigma = Eigen::MatrixXd::Identity(p, p);
      cov.chol = Eigen::MatrixXd::Identity(p, p);
      cov.identity_flag = true;
      return cov;
    case CovKind::toeplitz: {
      if (!(std::abs(spec.rho) < 1.0))
        throw InvalidRho("toeplitz correlation must satisfy |rho| < 1, got " +
                         std::to_string(spec.rho));
      Eigen::VectorXd powers(p);
      powers[0] = 1.0;
      for (int k = 1; k < p; ++k) powers[k] = powers[k - 1] * spec.rho;
      cov.sigma.resize(p, p);
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) cov.sigma(i, j) = powers[std::abs(i - j)];
      break;
    }
    case CovKind::custom: {
      if (spec.custom.rows() != p || spec.custom.cols() != p)
        throw DimensionMismatch("custom covariance must be p x p");
      if (!spec.custom.isApprox(spec.custom.transpose(), 1e-12))
        throw NotPositiveDefinite("custom covariance is not symmetric");
      cov.sigma = spec.custom;
      break;
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(cov.sigma);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("covariance Cholesky factorization failed");
  cov.chol = llt.matrixL();
  return cov;
}

}  // namespace lpl
