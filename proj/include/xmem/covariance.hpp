#pragma once

// Isotropic correlation models rho(|t|) on R^d or Z^d (d = 1, 2) and the
// power integrals int rho(t)^k dt that drive the memory series.

#include <string>
#include <vector>

namespace xmem {

enum class CovFamily { cauchy, exp_decay, user_grid, white_noise };

const char* to_string(CovFamily f);

struct CovarianceModel {
  CovFamily family = CovFamily::cauchy;
  int dim = 1;
  double eta = 1.0;     // cauchy: rho(t) = (1 + |t|^2)^{-eta/2}
  double lambda = 1.0;  // exp_decay: rho(t) = exp(-lambda |t|)
  // user_grid: rho tabulated at ascending radial lags starting with (0, 1),
  // linear in between, power-law continuation past the last lag.
  std::vector<double> grid_lags;
  std::vector<double> grid_values;
  // Index set Z^d instead of R^d: lag integrals become sums over t != 0.
  bool lattice = false;

  static CovarianceModel cauchy(double eta, int dim = 1, bool lattice = false);
  static CovarianceModel exp_decay(double lambda, int dim = 1, bool lattice = false);
  static CovarianceModel user_grid(std::vector<double> lags, std::vector<double> values,
                                   int dim = 1, bool lattice = false);
  /// rho = 0 off the origin.
  static CovarianceModel white_noise(int dim = 1);

  /// rho at Euclidean distance r >= 0.
  double correlation(double r) const;
  /// Power-law exponent of the tail: eta for cauchy, a fitted value for
  /// user_grid, +inf for exponential and white noise.
  double tail_exponent() const;
  bool nonnegative() const;

  void validate() const;
  std::string describe() const;

  bool operator==(const CovarianceModel&) const = default;
};

/// int_T rho(t)^k dt over T = R^d, or sum over Z^d \ {0} for lattice models.
/// Returns +inf when the integral diverges.
double rho_power_integral(const CovarianceModel& model, int k);

/// An upper bound U(k) >= rho_power_integral(model, k) that is nonincreasing
/// in k (used to close the memory series after truncation). +inf when the
/// integral may diverge.
double rho_power_upper_bound(const CovarianceModel& model, double k);

/// True when k * eta equals d up to 1e-12 (power-law families only).
bool at_divergence_boundary(const CovarianceModel& model, int k);

}  // namespace xmem
