#pragma once

// Probabilists' Hermite polynomials H_n, coefficients <f, H_k>_phi against the
// standard normal weight, and Hermite-rank detection.

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "xmem/numeric.hpp"

namespace xmem {

using RealFunction = std::function<double(double)>;

/// H_n(x) by the three-term recurrence H_{n+1} = x H_n - n H_{n-1}.
template <class T>
T hermite_eval(int n, T x) {
  if (n <= 0) return T(1);
  T prev = T(1);
  T cur = x;
  for (int k = 1; k < n; ++k) {
    const T next = x * cur - T(k) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

/// Fills out[k] = H_k(x) / sqrt(k!) for k < out.size(). These stay O(e^{x^2/4})
/// for every k, so they are the safe form for long series.
void normalized_hermite_all(double x, std::span<double> out);

enum class QuadScheme { adaptive_simpson, gauss_hermite };

struct QuadratureSpec {
  int node_count = 201;            // adaptive: initial grid nodes; gauss_hermite: rule size
  double domain_halfwidth = 16.0;  // standard-normal units; wide enough for x^24 phi(x)
  QuadScheme scheme = QuadScheme::adaptive_simpson;
  double rel_tol = 1e-15;
  std::vector<double> breakpoints;  // known discontinuities of f

  void validate() const;
};

struct HermiteCoefficients {
  std::vector<double> values;  // c_k = <f, H_k>_phi, k = 0..k_max
  int k_max = 0;
  double quad_error_estimate = 0.0;
  bool converged = true;
};

/// <f, H_k>_phi = int f(x) H_k(x) phi(x) dx.
QuadResult hermite_coeff(const RealFunction& f, int k, const QuadratureSpec& quad = {});

/// All coefficients up to k_max from a single pass over the quadrature nodes.
HermiteCoefficients hermite_coefficients(const RealFunction& f, int k_max,
                                         const QuadratureSpec& quad = {});

/// <f, g>_phi in extended precision. Used where the exact answer is a large
/// integer (k!) and double rounding alone would exceed the check tolerance.
template <class F, class G>
QuadResultL inner_product_phi(F&& f, G&& g, const QuadratureSpec& quad = {}) {
  quad.validate();
  auto integrand = [&](long double x) {
    return std::valarray<long double>{static_cast<long double>(f(x)) *
                                      static_cast<long double>(g(x)) * normal_pdf(x)};
  };
  if (quad.scheme == QuadScheme::gauss_hermite) {
    const GaussRule rule = gauss_hermite_rule(quad.node_count);
    long double s = 0.0L;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      s += rule.weights[i] * static_cast<long double>(f(rule.nodes[i])) *
           static_cast<long double>(g(rule.nodes[i]));
    }
    return {s, 0.0L, true};
  }
  const auto r = adaptive_simpson_vec(integrand, 1, -quad.domain_halfwidth, quad.domain_halfwidth,
                                      (quad.node_count - 1) / 2, quad.rel_tol, 0.0,
                                      quad.breakpoints);
  return r[0];
}

struct RankResult {
  std::optional<int> rank;  // empty: no coefficient above tolerance up to k_max
  int k_max = 0;
  std::vector<double> coefficients;
  double norm_estimate = 0.0;  // ||f||_phi, infinity when f is not in L^2_phi
  bool finite_variance = true;
  double threshold = 0.0;  // absolute cut used for the decisions
};

/// Smallest k in [1, k_max] with |<f, H_k>_phi| > tol * max(1, ||f||_phi).
/// When ||f||_phi is infinite the cut is the absolute `tol`.
/// Throws DomainError when f is not centred (|<f, H_0>| above the cut).
RankResult hermite_rank(const RealFunction& f, int k_max, double tol = 1e-7,
                        const QuadratureSpec& quad = {});

/// [(2k-1)!!]^2 / (2k)! = binom(2k, k) / 4^k, evaluated in log space.
double half_factorial_ratio(int k);

}  // namespace xmem
