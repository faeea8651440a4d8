#pragma once

// Laws of the white-noise factor Z in stochastic-volatility fields X = G(Y) Z.

#include <random>
#include <string>
#include <vector>

namespace xmem {

enum class ZFamily { gaussian, pareto, exponential, rademacher };

const char* to_string(ZFamily f);

struct ZDistribution {
  ZFamily family = ZFamily::gaussian;
  double alpha = 1.5;   // pareto tail index
  double x_min = 1.0;   // pareto scale
  double lambda = 1.0;  // exponential rate
  bool symmetric = false;  // pareto only: multiply by an independent random sign

  static ZDistribution gaussian();
  /// Pareto(alpha) on [x_min, inf). Without an explicit scale x_min is chosen
  /// so that the median of |Z| is 1. E Z^2 is infinite iff alpha <= 2.
  static ZDistribution pareto(double alpha, bool symmetric = false, double x_min = 0.0);
  static ZDistribution exponential(double lambda);
  static ZDistribution rademacher();

  /// P(Z > z).
  double tail(double z) const;
  /// P(Z < z), strict.
  double below(double z) const;
  bool is_symmetric() const;
  /// Points where the distribution function is not smooth.
  std::vector<double> kinks() const;

  double sample(std::mt19937_64& rng) const;

  void validate() const;
  std::string describe() const;

  bool operator==(const ZDistribution&) const = default;
};

}  // namespace xmem
