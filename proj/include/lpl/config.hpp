#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "lpl/covariance.hpp"
#include "lpl/errors.hpp"
#include "lpl/experiment.hpp"
#include "lpl/io.hpp"
#include "lpl/validate.hpp"

namespace lpl {

/// Generative description of a single problem instance for the solve and
/// check subcommands. The design, signal, and noise are sampled from the
/// seed; n may be given directly or through theta via the sample-size law.
struct InstanceSpec {
  int p = 32;
  int s = 3;
  std::optional<int> n;
  std::optional<double> theta;
  std::optional<double> lambda;  // default: the schedule
  std::optional<std::uint64_t> seed;
  bool normalize = false;  // rescale columns to squared norm n
};

struct ThresholdQuery {
  std::optional<double> c_min, c_max, epsilon;  // direct constants
  std::optional<int> p, s;                      // else derive from ensemble
};

/// Everything a CLI invocation needs, parsed from one JSON document.
struct LabConfig {
  ExperimentConfig experiment;
  InstanceSpec instance;
  ValidateConfig validation;
  ThresholdQuery thresholds;
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj,
                                const std::set<std::string>& known,
                                const std::string& where) {
  for (const auto& item : obj.items()) {
    if (!known.count(item.key()))
      throw ConfigError("unknown key '" + item.key() + "' in " + where);
  }
}

template <typename T>
void read_field(const nlohmann::json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("bad value for '") + key + "'");
  }
}

template <typename T>
void read_optional(const nlohmann::json& obj, const char* key,
                   std::optional<T>& out) {
  if (!obj.contains(key)) return;
  T value;
  read_field(obj, key, value);
  out = value;
}

inline CovarianceSpec parse_ensemble(const nlohmann::json& obj) {
  reject_unknown_keys(obj, {"kind", "rho", "matrix"}, "ensemble");
  std::string kind = "identity";
  read_field(obj, "kind", kind);
  if (kind == "identity") return CovarianceSpec::identity(0);
  if (kind == "toeplitz") {
    if (!obj.contains("rho"))
      throw ConfigError("toeplitz ensemble requires 'rho'");
    double rho = 0.0;
    read_field(obj, "rho", rho);
    if (!(std::abs(rho) < 1.0))
      throw ConfigError("toeplitz rho must satisfy |rho| < 1");
    return CovarianceSpec::toeplitz(0, rho);
  }
  if (kind == "custom") {
    if (!obj.contains("matrix"))
      throw ConfigError("custom ensemble requires 'matrix'");
    std::vector<std::vector<double>> rows;
    read_field(obj, "matrix", rows);
    const int p = static_cast<int>(rows.size());
    Eigen::MatrixXd sigma(p, p);
    for (int i = 0; i < p; ++i) {
      if (static_cast<int>(rows[i].size()) != p)
        throw ConfigError("custom covariance matrix must be square");
      for (int j = 0; j < p; ++j) sigma(i, j) = rows[i][j];
    }
    return CovarianceSpec::custom_matrix(std::move(sigma));
  }
  throw ConfigError("unknown ensemble kind: " + kind);
}

inline SuccessMode parse_success_mode(const std::string& name) {
  if (name == "solver") return SuccessMode::solver_sign;
  if (name == "certificate") return SuccessMode::certificate;
  if (name == "both") return SuccessMode::both;
  throw ConfigError("unknown success_mode: " + name +
                    " (expected solver|certificate|both)");
}

}  // namespace detail

inline LabConfig parse_config(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("config root must be an object");
  detail::reject_unknown_keys(
      doc,
      {"p_list", "regime", "alpha", "gamma", "ensemble", "sigma2",
       "signal_magnitude", "theta_grid", "trials", "base_seed",
       "success_mode", "s", "lambda", "ambiguity_tol", "solver_tol",
       "cross_check_stride", "instance", "validate", "thresholds"},
      "config");

  LabConfig config;
  ExperimentConfig& exp = config.experiment;
  detail::read_field(doc, "p_list", exp.p_list);
  if (doc.contains("regime"))
    exp.regime = regime_from_name(doc.at("regime").get<std::string>());
  detail::read_field(doc, "alpha", exp.alpha);
  detail::read_field(doc, "gamma", exp.gamma);
  if (doc.contains("ensemble"))
    exp.ensemble = detail::parse_ensemble(doc.at("ensemble"));
  detail::read_field(doc, "sigma2", exp.sigma2);
  detail::read_field(doc, "signal_magnitude", exp.signal_magnitude);
  detail::read_field(doc, "theta_grid", exp.theta_grid);
  detail::read_field(doc, "trials", exp.trials);
  detail::read_field(doc, "base_seed", exp.base_seed);
  if (doc.contains("success_mode"))
    exp.success_mode =
        detail::parse_success_mode(doc.at("success_mode").get<std::string>());
  detail::read_optional(doc, "s", exp.s_override);
  detail::read_optional(doc, "lambda", exp.lambda_override);
  detail::read_field(doc, "ambiguity_tol", exp.ambiguity_tol);
  detail::read_field(doc, "solver_tol", exp.solver_tol);
  detail::read_field(doc, "cross_check_stride", exp.cross_check_stride);

  if (doc.contains("instance")) {
    const auto& obj = doc.at("instance");
    detail::reject_unknown_keys(
        obj, {"p", "s", "n", "theta", "lambda", "seed", "normalize"},
        "instance");
    InstanceSpec& inst = config.instance;
    detail::read_field(obj, "p", inst.p);
    detail::read_field(obj, "s", inst.s);
    detail::read_optional(obj, "n", inst.n);
    detail::read_optional(obj, "theta", inst.theta);
    detail::read_optional(obj, "lambda", inst.lambda);
    detail::read_optional(obj, "seed", inst.seed);
    detail::read_field(obj, "normalize", inst.normalize);
    if (inst.n && inst.theta)
      throw ConfigError("instance: give 'n' or 'theta', not both");
  }

  if (doc.contains("validate")) {
    const auto& obj = doc.at("validate");
    detail::reject_unknown_keys(
        obj, {"n", "s", "off_support", "sigma2", "lambda", "replicates",
              "seed"},
        "validate");
    ValidateConfig& val = config.validation;
    detail::read_field(obj, "n", val.n);
    detail::read_field(obj, "s", val.s);
    detail::read_field(obj, "off_support", val.off_support);
    val.sigma2 = exp.sigma2;  // inherited unless given explicitly
    detail::read_field(obj, "sigma2", val.sigma2);
    detail::read_field(obj, "lambda", val.lambda);
    detail::read_field(obj, "replicates", val.replicates);
    detail::read_field(obj, "seed", val.seed);
  }
  config.validation.ensemble = exp.ensemble;

  if (doc.contains("thresholds")) {
    const auto& obj = doc.at("thresholds");
    detail::reject_unknown_keys(obj, {"c_min", "c_max", "epsilon", "p", "s"},
                                "thresholds");
    ThresholdQuery& q = config.thresholds;
    detail::read_optional(obj, "c_min", q.c_min);
    detail::read_optional(obj, "c_max", q.c_max);
    detail::read_optional(obj, "epsilon", q.epsilon);
    detail::read_optional(obj, "p", q.p);
    detail::read_optional(obj, "s", q.s);
    const int given = int(bool(q.c_min)) + int(bool(q.c_max)) +
                      int(bool(q.epsilon));
    if (given != 0 && given != 3)
      throw ConfigError(
          "thresholds: give all of c_min/c_max/epsilon or none");
  }

  return config;
}

inline LabConfig load_config(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("cannot parse " + path + ": " + e.what());
  }
  return parse_config(doc);
}

}  // namespace lpl
