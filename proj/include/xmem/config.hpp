#pragma once

// Flat key = value experiment configuration with dotted section names:
//
//   command = classify
//   model.family = cauchy
//   model.eta = 0.3
//   transform.name = exp_sq
//   transform.param = 2
//   measure.dirac = 2
//   run.seed = 17
//
// '#' starts a comment. Lists are comma separated.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "xmem/covariance.hpp"
#include "xmem/errors.hpp"
#include "xmem/measure.hpp"
#include "xmem/transform.hpp"
#include "xmem/zdist.hpp"

namespace xmem {

/// Malformed or incomplete configuration.
class ConfigError : public DomainError {
 public:
  using DomainError::DomainError;
};

struct ModelSpec {
  std::string family = "cauchy";
  double eta = 1.0;
  double lambda = 1.0;
  int dim = 1;
  bool lattice = false;
  std::vector<double> lags;
  std::vector<double> values;

  CovarianceModel build() const;
  bool operator==(const ModelSpec&) const = default;
};

struct TransformSpec {
  std::string name = "identity";
  double param = 0.0;

  Transform build() const;
  bool operator==(const TransformSpec&) const = default;
};

struct MeasureSpec {
  std::vector<Atom> dirac;
  // mean, sd, mass of a Gaussian-shaped density part
  std::optional<std::vector<double>> gaussian;
  int gaussian_points = 241;

  FiniteMeasure build() const;
  bool operator==(const MeasureSpec&) const = default;
};

struct ZSpec {
  std::string family = "gaussian";
  double alpha = 1.5;
  double x_min = 0.0;  // 0: median-one default
  double lambda = 1.0;
  bool symmetric = false;

  ZDistribution build() const;
  bool operator==(const ZSpec&) const = default;
};

struct ExperimentConfig {
  std::string command;
  std::string experiment_id;
  std::optional<ModelSpec> model;
  std::optional<TransformSpec> transform;
  std::optional<MeasureSpec> measure;
  std::optional<ZSpec> z;

  std::vector<double> levels;
  std::vector<int> n_values;
  std::optional<int> replicates;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string output_path;
  std::string dump_path;  // optional binary dump of one simulated sample
  std::string plot_path;  // optional gnuplot data file

  // classify / volatility-classify
  int k_max = 0;  // 0: command default
  double tol = 1e-7;
  std::vector<double> sweep_eta;
  std::vector<double> sweep_dirac;

  // partial-sum
  std::optional<double> alpha;
  double q_lo = 0.25;
  double q_hi = 0.75;

  // cov-check
  std::vector<double> cov_r;
  std::vector<double> cov_u;
  std::vector<double> cov_v;

  bool operator==(const ExperimentConfig&) const = default;
};

inline const std::vector<std::string>& known_commands() {
  static const std::vector<std::string> c{"classify", "volatility-classify", "rank",
                                          "clt",      "partial-sum",         "cov-check"};
  return c;
}

/// Parses the text of a config file. Throws ConfigError with a line number
/// on syntax errors, unknown keys, or bad values.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical text form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& c);

/// Checks that every field the command needs is present.
void validate_for_command(const ExperimentConfig& c);

}  // namespace xmem
