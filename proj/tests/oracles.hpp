#pragma once

// Reference values computed without the library's numerics: closed forms,
// exact arithmetic, and plain fixed-step quadrature.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

// |a - b| <= max(abs_tol, rel_tol * max(|a|, |b|)).
inline bool close(double a, double b, double rel_tol, double abs_tol = 0.0) {
  return std::fabs(a - b) <= std::max(abs_tol, rel_tol * std::max(std::fabs(a), std::fabs(b)));
}

inline double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
inline double phibar(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

// Explicit low-degree Hermite polynomials.
inline double H0(double) { return 1.0; }
inline double H1(double x) { return x; }
inline double H2(double x) { return x * x - 1.0; }
inline double H3(double x) { return x * x * x - 3.0 * x; }

// binom(2k, k) / 4^k as an exact running product.
inline double central_binomial_ratio(int k) {
  long double r = 1.0L;
  for (int j = 1; j <= k; ++j) r *= (2.0L * j - 1.0L) / (2.0L * j);
  return static_cast<double>(r);
}

// P(X > 0, Y > 0) - 1/4 for correlation r.
inline double orthant_cov_at_zero(double r) { return std::asin(r) / (2.0 * std::numbers::pi); }

// Composite Simpson with a fixed even number of intervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int intervals) {
  if (intervals % 2) ++intervals;
  const double h = (b - a) / intervals;
  double s = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

// E f(Y) for standard normal Y by fixed-step Simpson on [-12, 12].
inline double normal_expectation(const std::function<double(double)>& f, int intervals = 24000) {
  return simpson([&](double x) { return f(x) * phi(x); }, -12.0, 12.0, intervals);
}

// int_R (1+t^2)^{-a} dt = sqrt(pi) Gamma(a - 1/2) / Gamma(a).
inline double cauchy_line_integral(double a) {
  return std::sqrt(std::numbers::pi) * std::exp(std::lgamma(a - 0.5) - std::lgamma(a));
}

// Least-squares slope of log y on log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= x.size();
  my /= y.size();
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
  }
  return sxy / sxx;
}

// Exact Var(sum_{i<n} 1{Y_i > u}) for a stationary Gaussian sequence, from
// the lag covariances of the indicators.
inline double indicator_sum_variance(int n, const std::vector<double>& lag_cov) {
  double v = n * lag_cov[0];
  for (int t = 1; t < n; ++t) v += 2.0 * (n - t) * lag_cov[t];
  return v;
}

// Tiny splitmix64 for property-test inputs, separate from the library RNG.
struct SplitMix {
  std::uint64_t state;
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform(double a, double b) { return a + (b - a) * (next() >> 11) * 0x1.0p-53; }
};

}  // namespace oracle
