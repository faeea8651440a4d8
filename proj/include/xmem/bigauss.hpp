#pragma once

// Covariance of exceedance indicators of a standard bivariate normal pair:
// Cov(1{X > u}, 1{Y > v}) for Corr(X, Y) = r.

namespace xmem {

struct IndicatorCovInput {
  double r = 0.0;  // correlation, |r| < 1
  double u = 0.0;
  double v = 0.0;

  void validate() const;
};

/// (1/2pi) int_0^r (1-s^2)^{-1/2} exp{-(u^2 - 2suv + v^2) / (2(1-s^2))} ds,
/// integrated in s = sin(theta) so the endpoint singularity disappears.
/// Throws QuadratureError if the adaptive rule cannot reach `tol`.
double indicator_cov_integral(const IndicatorCovInput& in, double tol = 1e-13);

/// Sum_{k=1}^{K} r^k / k! * phi(u) H_{k-1}(u) * phi(v) H_{k-1}(v), i.e. the
/// Mehler expansion of the bivariate density integrated term by term.
double indicator_cov_series(const IndicatorCovInput& in, int terms);

/// Same series truncated where a Cramer-inequality tail bound drops below
/// 1e-16 (capped at 20000 terms).
struct SeriesResult {
  double value = 0.0;
  int terms = 0;
};
SeriesResult indicator_cov_series_adaptive(const IndicatorCovInput& in);

/// P(X > u, Y > v) by brute-force tensor-product quadrature of the bivariate
/// density over [max(u,-10), 10] x [max(v,-10), 10].
double orthant_oracle(double r, double u, double v);

/// Lag-0 limit: Cov(1{X > u}, 1{X > v}) = Phibar(max(u,v)) - Phibar(u) Phibar(v).
double indicator_cov_at_unit_correlation(double u, double v);

/// Numeric int int Cov(r, u, v) du dv over [-halfwidth, halfwidth]^2 with a
/// composite Simpson grid of spacing `step` (rounded so the count is even).
double hoeffding_reconstruct(double r, double halfwidth = 8.0, double step = 0.05);

}  // namespace xmem
