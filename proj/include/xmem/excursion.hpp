#pragma once

// Excursion volumes of simulated fields, Monte Carlo ensembles over growing
// windows, and log-log scaling exponents of their variances.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "xmem/covariance.hpp"
#include "xmem/fieldsim.hpp"
#include "xmem/hermite.hpp"
#include "xmem/numeric.hpp"
#include "xmem/transform.hpp"
#include "xmem/zdist.hpp"

namespace xmem {

struct ExcursionStat {
  double level = 0.0;
  double raw_volume = 0.0;
  double centered_normalized = 0.0;
  int window_n = 0;
  int dim = 1;
};

/// cell_volume * #{t : X_t > u}.
double excursion_volume(const FieldSample& s, double u);
double excursion_volume(std::span<const double> values, double u, double cell_volume = 1.0);

/// (V - n^d tail) / n^{d/2}.
double normalized_stat(const FieldSample& s, double u, double tail);
ExcursionStat excursion_stat(const FieldSample& s, double u, double tail);

struct ScalingReport {
  std::vector<double> n_values;
  std::vector<double> variances;  // dispersion per n (variance, or IQR for partial sums)
  double exponent = 0.0;
  double intercept = 0.0;
  double exponent_stderr = 0.0;  // from the regression residuals
  // From the sampling error of each variance estimate (0 when unknown).
  double sampling_stderr = 0.0;
  int replicates = 0;

  /// Residual and sampling errors combined in quadrature.
  double combined_stderr() const;
};

/// OLS slope of log2(values) on log2(n). Needs >= 3 strictly increasing n
/// spanning a factor >= 8 and positive values.
ScalingReport scaling_exponent(std::span<const double> n_values, std::span<const double> values,
                               int replicates = 0);

struct EnsembleConfig {
  CovarianceModel model;
  Transform transform = Transform::identity();
  std::optional<ZDistribution> z;
  std::vector<double> levels;
  std::vector<int> n_values;
  int replicates = 500;
  std::uint64_t master_seed = 0;
  int threads = 1;
};

struct EnsembleCell {
  double level = 0.0;
  int n = 0;
  double tail = 0.0;  // marginal exceedance probability used for centring
  Moments moments;    // of the normalized statistic
  double volume_variance = 0.0;  // moments.variance * n^d
};

struct EnsembleResult {
  std::vector<double> levels;
  std::vector<int> n_values;
  int dim = 1;
  int replicates = 0;
  std::vector<EnsembleCell> cells;  // level-major

  const EnsembleCell& cell(std::size_t level_index, std::size_t n_index) const;
  /// Exponent of Var(V) against n at one level, with sampling error from the
  /// ensemble kurtosis.
  ScalingReport scaling(std::size_t level_index) const;
};

/// Replicate r at window index i uses stream (i << 32) | r of the master seed.
EnsembleResult mc_ensemble(const EnsembleConfig& config);

struct PartialSumConfig {
  CovarianceModel model;
  double alpha = 1.5;
  std::vector<int> n_values;
  int replicates = 500;
  std::uint64_t master_seed = 0;
  int threads = 1;
  double q_lo = 0.25;
  double q_hi = 0.75;
};

struct PartialSumReport {
  ScalingReport scaling;  // on the inter-quantile ranges
  std::vector<double> iqr;
  double mean = 0.0;       // E exp(Y^2 / (2 alpha)) by quadrature
  double predicted = 0.0;  // max(1/alpha, 1 - eta)
};

/// Dispersion scaling of S_n = sum_{t<n} (X_t - E X) for X = exp(Y^2/(2 alpha)).
PartialSumReport partial_sum_scaling(const PartialSumConfig& config);

struct CltTheory {
  std::optional<int> q;  // Hermite rank of xi; empty when xi vanishes
  bool xi_zero = false;
  std::optional<double> sigma2;  // E[chi(Y_0)] when xi vanishes
  double predicted_exponent = 0.0;
  RankResult rank;
};

/// xi(y) = P(G(y) Z > u) - P(X_0 > u) (or 1{G(y) > u} - P(X_0 > u) without
/// Z), its Hermite rank, and the variance exponent it predicts for the
/// excursion volume under `model`: d in the central case (xi = 0 or
/// q eta >= d), 2d - q eta otherwise.
CltTheory xi_and_rank(const Transform& g, const std::optional<ZDistribution>& z, double u,
                      const CovarianceModel& model, int k_max = 12, double tol = 1e-7);

}  // namespace xmem
