#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "lpl/conditions.hpp"
#include "lpl/covariance.hpp"
#include "lpl/ensemble.hpp"
#include "lpl/errors.hpp"
#include "lpl/rng.hpp"
#include "lpl/solver.hpp"
#include "lpl/theory.hpp"

namespace lpl {

/// How a trial is classified as a sign-recovery success.
///   solver_sign: solve the program and compare sign patterns.
///   certificate: evaluate the exact optimality certificate (no iterative
///                solve); a deterministic subset of trials is re-checked
///                with the solver to guard against implementation drift.
///   both: run both classifiers on every trial.
enum class SuccessMode { solver_sign, certificate, both };

inline std::string success_mode_name(SuccessMode mode) {
  switch (mode) {
    case SuccessMode::solver_sign: return "solver";
    case SuccessMode::certificate: return "certificate";
    case SuccessMode::both: return "both";
  }
  return "unknown";
}

struct ExperimentConfig {
  std::vector<int> p_list{128, 256, 512};
  SparsityRegime regime = SparsityRegime::fractional_power;
  double alpha = 0.40;
  double gamma = 0.75;
  CovarianceSpec ensemble = CovarianceSpec::identity(0);  // dim set per p
  double sigma2 = 0.25;
  double signal_magnitude = 0.5;
  std::vector<double> theta_grid = default_theta_grid();
  int trials = 200;
  std::uint64_t base_seed = 20060501;
  SuccessMode success_mode = SuccessMode::certificate;
  std::optional<int> s_override;        // fixed sparsity instead of regime
  std::optional<double> lambda_override;
  double ambiguity_tol = 1e-6;
  double solver_tol = 1e-8;
  int cross_check_stride = 10;  // certificate mode solves every k-th trial

  /// 24 evenly spaced points covering (0, 2.4].
  static std::vector<double> default_theta_grid() {
    std::vector<double> grid(24);
    for (int k = 0; k < 24; ++k) grid[k] = 0.1 * (k + 1);
    return grid;
  }

  void validate() const {
    if (p_list.empty()) throw ConfigError("p_list must not be empty");
    for (int p : p_list)
      if (p < 4) throw ConfigError("p must be at least 4");
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (theta_grid.empty()) throw ConfigError("theta_grid must not be empty");
    for (double t : theta_grid)
      if (!(t > 0.0)) throw ConfigError("theta values must be positive");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha not in (0,1)");
    if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("gamma not in (0,1)");
    if (sigma2 < 0.0) throw ConfigError("sigma2 must be nonnegative");
    if (!(signal_magnitude > 0.0))
      throw ConfigError("signal_magnitude must be positive");
    if (cross_check_stride < 1)
      throw ConfigError("cross_check_stride must be >= 1");
  }

  int sparsity_for(int p) const {
    if (s_override) {
      if (*s_override < 1 || *s_override >= p)
        throw ConfigError("s_override outside [1, p-1]");
      return *s_override;
    }
    return sparsity_index(regime, p, alpha, gamma);
  }

  double lambda_for(int n, int p, int s) const {
    if (lambda_override) {
      if (!(*lambda_override > 0.0))
        throw ConfigError("lambda_override must be positive");
      return *lambda_override;
    }
    return lambda_schedule(n, p, s);
  }
};

struct TrialOutcome {
  double theta = 0.0;
  int p = 0;
  int s = 0;
  int n = 0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  bool success_certificate = false;
  bool success_solver = false;
  bool solver_checked = false;
  bool ambiguous = false;
  bool singular = false;
  bool success = false;  // classification after the failure policies
  double kkt_residual = std::numeric_limits<double>::quiet_NaN();
  double margin_a = 0.0;
  double margin_b = 0.0;
  double wall_seconds = 0.0;
};

/// Aggregated results for one (p, theta) grid cell.
struct SweepCell {
  int p = 0;
  SparsityRegime regime = SparsityRegime::fractional_power;
  double theta = 0.0;
  int s = 0;
  int n = 0;
  double lambda = 0.0;
  int trials = 0;
  int successes = 0;
  double p_hat = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  int ambiguous = 0;
  int singular = 0;
  int disagreements = 0;  // solver vs certificate on non-ambiguous trials
  double mean_kkt = std::numeric_limits<double>::quiet_NaN();
};

struct SweepResult {
  std::vector<SweepCell> cells;  // sorted by (p, theta)
};

/// Wilson score interval for a binomial proportion.
inline std::pair<double, double> wilson_interval(int successes, int trials,
                                                 double z = 1.96) {
  if (trials < 1 || successes < 0 || successes > trials)
    throw ConfigError("wilson_interval: need 0 <= successes <= trials");
  const double nt = static_cast<double>(trials);
  const double p_hat = successes / nt;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nt;
  const double center = (p_hat + z2 / (2.0 * nt)) / denom;
  const double half =
      z * std::sqrt(p_hat * (1.0 - p_hat) / nt + z2 / (4.0 * nt * nt)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

/// Worker count for sweeps: explicit argument, else LPL_THREADS, else
/// hardware concurrency. Never affects results, only wall time.
inline int worker_count(int requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("LPL_THREADS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) return parsed;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Runs a single Monte Carlo trial. Everything (support, signs, design,
/// noise) is resampled from a seed derived from (base_seed, p,
/// theta_index, trial_index), so the outcome is a pure function of the
/// config and the trial coordinates.
inline TrialOutcome run_trial(const ExperimentConfig& config, int theta_index,
                              int p, int trial_index, const Covariance& cov) {
  const auto start = std::chrono::steady_clock::now();
  const double theta = config.theta_grid.at(theta_index);

  TrialOutcome out;
  out.theta = theta;
  out.p = p;
  out.s = config.sparsity_for(p);
  out.n = sample_size(theta, out.s, p);
  out.lambda = config.lambda_for(out.n, p, out.s);
  out.seed = trial_seed(config.base_seed, p, theta_index, trial_index);

  Rng rng(out.seed);
  const SparseSignal signal =
      make_signal(p, out.s, config.signal_magnitude, rng);
  Eigen::MatrixXd X = sample_design(cov, out.n, rng);
  ProblemInstance inst = observe(std::move(X), signal, config.sigma2, rng);

  const bool want_solver =
      config.success_mode == SuccessMode::solver_sign ||
      config.success_mode == SuccessMode::both ||
      (config.success_mode == SuccessMode::certificate &&
       trial_index % config.cross_check_stride == 0);
  const bool want_certificate =
      config.success_mode != SuccessMode::solver_sign;

  if (want_certificate) {
    try {
      const RecoveryCertificate cert = certify_sign_recovery(
          inst.X, inst.signal, inst.noise, out.lambda, /*delta_b=*/0.0,
          config.ambiguity_tol);
      out.success_certificate = cert.cond_a && cert.cond_b;
      out.ambiguous = cert.ambiguous;
      out.margin_a = cert.margin_a;
      out.margin_b = cert.margin_b;
    } catch (const SingularGram&) {
      out.singular = true;
    }
  }
  if (want_solver && !out.singular) {
    SolverOptions opts;
    opts.tol_kkt = config.solver_tol;
    const LassoSolution sol = solve_lasso(inst.X, inst.y, out.lambda, opts);
    out.success_solver = recovery_success(sol.beta_hat, inst.signal);
    out.solver_checked = true;
    out.kkt_residual = sol.kkt_residual;
  }

  bool classified = false;
  switch (config.success_mode) {
    case SuccessMode::solver_sign: classified = out.success_solver; break;
    case SuccessMode::certificate:
    case SuccessMode::both: classified = out.success_certificate; break;
  }
  // Singular designs and boundary-ambiguous trials count as failures.
  out.success = classified && !out.ambiguous && !out.singular;

  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return out;
}

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

/// Runs the full (p, theta, trial) grid. Trials execute in parallel over
/// a work queue; aggregation is a fixed-order reduction over trial
/// indices, so results are identical for any worker count.
inline SweepResult run_sweep(const ExperimentConfig& config,
                             const ProgressFn& progress = {},
                             int workers = 0) {
  config.validate();
  const std::size_t n_p = config.p_list.size();
  const std::size_t n_theta = config.theta_grid.size();
  const std::size_t n_trials = static_cast<std::size_t>(config.trials);
  const std::size_t total = n_p * n_theta * n_trials;

  std::map<int, Covariance> covariances;
  for (int p : config.p_list)
    covariances.emplace(p, build_covariance(config.ensemble.with_dim(p)));

  std::vector<TrialOutcome> outcomes(total);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;

  const int n_workers =
      static_cast<int>(std::min<std::size_t>(worker_count(workers), total));
  auto work = [&]() {
    for (;;) {
      const std::size_t job = next.fetch_add(1);
      if (job >= total) return;
      const std::size_t pi = job / (n_theta * n_trials);
      const std::size_t rem = job % (n_theta * n_trials);
      const int theta_index = static_cast<int>(rem / n_trials);
      const int trial_index = static_cast<int>(rem % n_trials);
      const int p = config.p_list[pi];
      outcomes[job] = run_trial(config, theta_index, p, trial_index,
                                covariances.at(p));
      const std::size_t finished = done.fetch_add(1) + 1;
      if (progress) {
        std::lock_guard<std::mutex> lock(progress_mutex);
        progress(finished, total);
      }
    }
  };
  if (n_workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  SweepResult result;
  result.cells.reserve(n_p * n_theta);
  for (std::size_t pi = 0; pi < n_p; ++pi) {
    for (std::size_t ti = 0; ti < n_theta; ++ti) {
      SweepCell cell;
      cell.p = config.p_list[pi];
      cell.regime = config.regime;
      cell.theta = config.theta_grid[ti];
      cell.trials = config.trials;
      double kkt_sum = 0.0;
      int kkt_count = 0;
      for (std::size_t k = 0; k < n_trials; ++k) {
        const TrialOutcome& t =
            outcomes[(pi * n_theta + ti) * n_trials + k];
        cell.s = t.s;
        cell.n = t.n;
        cell.lambda = t.lambda;
        cell.successes += t.success ? 1 : 0;
        cell.ambiguous += t.ambiguous ? 1 : 0;
        cell.singular += t.singular ? 1 : 0;
        if (t.solver_checked && !t.ambiguous && !t.singular &&
            t.success_solver != t.success_certificate &&
            config.success_mode != SuccessMode::solver_sign)
          ++cell.disagreements;
        if (t.solver_checked && std::isfinite(t.kkt_residual)) {
          kkt_sum += t.kkt_residual;
          ++kkt_count;
        }
      }
      cell.p_hat = static_cast<double>(cell.successes) / cell.trials;
      std::tie(cell.ci_lo, cell.ci_hi) =
          wilson_interval(cell.successes, cell.trials);
      if (kkt_count > 0) cell.mean_kkt = kkt_sum / kkt_count;
      result.cells.push_back(cell);
    }
  }
  std::sort(result.cells.begin(), result.cells.end(),
            [](const SweepCell& a, const SweepCell& b) {
              return a.p != b.p ? a.p < b.p : a.theta < b.theta;
            });
  return result;
}

/// Pool-adjacent-violators fit: the nondecreasing sequence closest to the
/// input in least squares.
inline std::vector<double> isotonic_fit(const std::vector<double>& values) {
  std::vector<double> level;
  std::vector<double> weight;
  for (double v : values) {
    level.push_back(v);
    weight.push_back(1.0);
    while (level.size() >= 2 && level[level.size() - 2] > level.back()) {
      const double w = weight[weight.size() - 2] + weight.back();
      const double merged = (level[level.size() - 2] * weight[weight.size() - 2] +
                             level.back() * weight.back()) /
                            w;
      level.pop_back();
      weight.pop_back();
      level.back() = merged;
      weight.back() = w;
    }
  }
  std::vector<double> out;
  out.reserve(values.size());
  for (std::size_t k = 0; k < level.size(); ++k)
    out.insert(out.end(), static_cast<std::size_t>(weight[k] + 0.5), level[k]);
  return out;
}

/// Linearly interpolated theta at which the isotonic-smoothed success
/// curve first reaches `target`. Returns nullopt if it never does.
inline std::optional<double> curve_crossing(const std::vector<double>& thetas,
                                            const std::vector<double>& p_hats,
                                            double target) {
  const std::vector<double> smooth = isotonic_fit(p_hats);
  if (smooth.empty() || smooth.front() >= target)
    return smooth.empty() ? std::nullopt
                          : std::make_optional(thetas.front());
  for (std::size_t k = 1; k < smooth.size(); ++k) {
    if (smooth[k] >= target) {
      const double lo = smooth[k - 1];
      const double hi = smooth[k];
      if (hi == lo) return thetas[k];
      const double frac = (target - lo) / (hi - lo);
      return thetas[k - 1] + frac * (thetas[k] - thetas[k - 1]);
    }
  }
  return std::nullopt;
}

/// Width in theta of the transition band {lo <= p_hat <= hi} on the
/// smoothed curve. Nullopt when the curve does not span the band.
inline std::optional<double> transition_width(
    const std::vector<double>& thetas, const std::vector<double>& p_hats,
    double lo = 0.1, double hi = 0.9) {
  const auto theta_lo = curve_crossing(thetas, p_hats, lo);
  const auto theta_hi = curve_crossing(thetas, p_hats, hi);
  if (!theta_lo || !theta_hi) return std::nullopt;
  return *theta_hi - *theta_lo;
}

}  // namespace lpl
