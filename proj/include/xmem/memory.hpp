#pragma once

// Short/long memory classification of subordinated Gaussian and stochastic
// volatility fields through the Hermite series of the integrated absolute
// indicator covariance, plus a direct numerical integration of that quantity.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "xmem/covariance.hpp"
#include "xmem/measure.hpp"
#include "xmem/transform.hpp"
#include "xmem/zdist.hpp"

namespace xmem {

enum class Verdict { SRD, LRD, BOUNDARY, INCONCLUSIVE };

const char* to_string(Verdict v);
/// Ordering used when a sweep reports its worst case:
/// SRD < INCONCLUSIVE < BOUNDARY < LRD.
int severity(Verdict v);

struct DivergenceCertificate {
  int k = 0;            // power of rho whose integral diverges
  std::string reason;   // e.g. "k*eta <= d"
  double coefficient = 0.0;  // normalized series coefficient at that power
};

struct MemoryVerdict {
  Verdict verdict = Verdict::INCONCLUSIVE;
  // partial_sum plus a power-law estimate of the terms past the truncation
  // (never above tail_bound); +inf for LRD and BOUNDARY.
  double series_value = 0.0;
  double partial_sum = 0.0;  // sum of the evaluated finite terms
  double tail_bound = 0.0;   // rigorous bound on the terms past the truncation
  std::optional<DivergenceCertificate> certificate;
  FiniteMeasure mu;
  int truncation = 0;  // number of series terms evaluated
};

/// b_k(mu) = (int H_k(G^-(u)) phi(G^-(u)) mu(du))^2 over the closure of the
/// image of G. Atoms outside the image contribute nothing: the indicator
/// 1{G(Y) > u} is then almost surely constant.
double bk_coefficient(const Transform& g, const FiniteMeasure& mu, int k);

/// b_k(mu) / k! for k = 0..k_max, stable for large k.
std::vector<double> bk_normalized(const Transform& g, const FiniteMeasure& mu, int k_max);

/// Evaluates
///   sum_{k>=1} b_{k-1}/k! int rho^k                 (monotone G), or
///   4 sum_{k>=1} b_{2k-1}/(2k)! int rho^{2k}        (even-composed G)
/// and decides SRD / LRD / BOUNDARY / INCONCLUSIVE. A coefficient counts as
/// nonzero when b/(k! mass^2) exceeds tol^2, i.e. the normalized Hermite
/// coefficient exceeds tol.
MemoryVerdict classify_subordinated(const Transform& g, const CovarianceModel& model,
                                    const FiniteMeasure& mu, int k_max = 2000, double tol = 1e-7);

/// Series sum_k <Fbar_Z(u/G), H_k>^2 / k! int rho^k aggregated over the atoms
/// of mu, for X = G(Y) Z with white noise Z and G >= 0.
MemoryVerdict volatility_memory_series(const Transform& g, const ZDistribution& z,
                                       const CovarianceModel& model, const FiniteMeasure& mu,
                                       int k_max = 60, double tol = 1e-7);

/// Hermite coefficients of y -> P(G(y) Z > u) aggregated over the atoms of mu.
std::vector<double> volatility_coefficients(const Transform& g, const ZDistribution& z,
                                            const FiniteMeasure& mu, int k_max);

struct Sigma2Options {
  int dim = 1;
  bool lattice = false;
};

struct Sigma2Result {
  double value = 0.0;          // integral up to the cutoff
  double tail_estimate = 0.0;  // power-law extrapolation past the cutoff
  bool tail_warning = false;   // tail_estimate above 1% of value
};

/// Direct evaluation of int_T int int |Cov(1{Y_0 > u}, 1{Y_t > v})| mu(du) mu(dv) dt
/// for a Gaussian field with radial correlation r_of_t: trapezoid over lags
/// in [0, cutoff] (or a lattice sum), with the bivariate normal kernel.
Sigma2Result sigma2_numeric(const std::function<double(double)>& r_of_t, const FiniteMeasure& mu,
                            double cutoff, double lag_step, const Sigma2Options& opts = {});

}  // namespace xmem
