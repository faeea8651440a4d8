#pragma once

// Small numerical toolkit shared by every module: standard normal functions,
// adaptive Simpson quadrature (scalar and vector valued), Gauss-Hermite rules
// and deterministic summation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <valarray>
#include <vector>

namespace xmem {

inline constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343818684758586311649;

/// Standard normal density.
inline double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }
inline long double normal_pdf(long double x) {
  return 0.39894228040143267793994605993438187L * std::exp(-0.5L * x * x);
}

/// Standard normal c.d.f. Phi(x), via erfc so both tails keep relative accuracy.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Standard normal tail 1 - Phi(x).
inline double normal_tail(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

inline double log_factorial(int k) { return std::lgamma(static_cast<double>(k) + 1.0); }

/// Pairwise (cascade) summation. The order of additions depends only on the
/// length of the input, so results do not depend on how values were produced.
double pairwise_sum(std::span<const double> values);

/// Shortest decimal text that reads back to the same double ("inf", "nan" for non-finite).
std::string shortest(double v);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  std::size_t count = 0;
};

/// Sample moments with pairwise reductions. Needs at least two values.
Moments sample_moments(std::span<const double> values);

/// Empirical quantile with linear interpolation between order statistics
/// (type 7 of Hyndman and Fan). `p` in [0, 1].
double quantile(std::vector<double> values, double p);

/// Outcome of a quadrature: value, error estimate, and whether the requested
/// tolerance was met everywhere.
struct QuadResult {
  double value = 0.0;
  double abs_error = 0.0;
  bool converged = true;
};

/// Nodes and weights integrating against the standard normal density:
/// sum_i w_i g(x_i) ~ int g(x) phi(x) dx.
struct GaussRule {
  std::vector<long double> nodes;
  std::vector<long double> weights;
};

/// Probabilists' Gauss-Hermite rule with `n` nodes (exact for polynomials of
/// degree < 2n).
GaussRule gauss_hermite_rule(int n);

/// Gauss-Legendre rule on [-1, 1].
GaussRule gauss_legendre_rule(int n);

namespace detail {

inline long double magnitude(long double v) { return std::fabs(v); }

template <class V>
struct SimpsonState {
  V sum;
  V err;
  bool ok = true;
};

// Component-wise test |diff| <= 15 * tol * frac.
inline bool within(long double diff, long double tol, long double frac) {
  return std::fabs(diff) <= 15.0L * tol * frac;
}
inline bool within(const std::valarray<long double>& diff, const std::valarray<long double>& tol,
                   long double frac) {
  for (std::size_t i = 0; i < diff.size(); ++i) {
    if (!(std::fabs(diff[i]) <= 15.0L * tol[i] * frac)) return false;
  }
  return true;
}
inline bool all_finite(long double v) { return std::isfinite(v); }
inline bool all_finite(const std::valarray<long double>& v) {
  for (long double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}
inline long double abs_of(long double v) { return std::fabs(v); }
inline std::valarray<long double> abs_of(const std::valarray<long double>& v) { return std::abs(v); }

template <class V, class F, class T>
void simpson_recurse(F& f, long double a, long double b, const V& fa, const V& fm, const V& fb,
                     const V& whole, const T& tol, long double frac, int depth,
                     SimpsonState<V>& st) {
  const long double m = 0.5L * (a + b);
  const long double h = b - a;
  const V flm = f(0.5L * (a + m));
  const V frm = f(0.5L * (m + b));
  const V left = (h / 12.0L) * (fa + 4.0L * flm + fm);
  const V right = (h / 12.0L) * (fm + 4.0L * frm + fb);
  const V diff = left + right - whole;
  // Overflow or NaN in f: no refinement can help, so stop here and let the
  // non-finite sum reach the caller.
  if (!all_finite(diff)) {
    st.ok = false;
    st.sum += left + right;
    return;
  }
  if (depth <= 0 || within(diff, tol, frac)) {
    if (depth <= 0 && !within(diff, tol, frac)) st.ok = false;
    st.sum += left + right + diff / 15.0L;
    st.err += abs_of(diff) / 15.0L;
    return;
  }
  simpson_recurse(f, a, m, fa, flm, fm, left, tol, 0.5L * frac, depth - 1, st);
  simpson_recurse(f, m, b, fm, frm, fb, right, tol, 0.5L * frac, depth - 1, st);
}

}  // namespace detail

/// Splits [a, b] at the interior `breaks` into pieces carrying roughly
/// `panels` Simpson panels in total (at least two per piece).
std::vector<std::pair<long double, long double>> make_panels(long double a, long double b,
                                                             std::span<const double> breaks,
                                                             int panels);

/// Adaptive Simpson over [a, b] starting from `panels` equal panels (with
/// extra splits at `breaks`). The absolute tolerance is
/// max(rel_tol * integral of |f|, abs_floor), estimated on the initial grid.
template <class F>
QuadResult adaptive_simpson(F&& f, double a, double b, int panels, double rel_tol,
                            double abs_floor = 0.0, std::span<const double> breaks = {},
                            int max_depth = 40) {
  auto g = [&](long double x) -> long double { return static_cast<long double>(f(x)); };
  const auto pieces = make_panels(a, b, breaks, panels);
  struct Cached {
    long double a, b, fa, fm, fb;
  };
  std::vector<Cached> cache;
  cache.reserve(pieces.size());
  long double scale = 0.0L;
  for (auto [lo, hi] : pieces) {
    Cached c{lo, hi, g(lo), g(0.5L * (lo + hi)), g(hi)};
    scale += (hi - lo) / 6.0L * (std::fabs(c.fa) + 4.0L * std::fabs(c.fm) + std::fabs(c.fb));
    cache.push_back(c);
  }
  const long double tol = std::max<long double>(rel_tol * scale, abs_floor);
  const long double width = static_cast<long double>(b) - a;
  detail::SimpsonState<long double> st{0.0L, 0.0L, true};
  for (const auto& c : cache) {
    const long double whole = (c.b - c.a) / 6.0L * (c.fa + 4.0L * c.fm + c.fb);
    detail::simpson_recurse(g, c.a, c.b, c.fa, c.fm, c.fb, whole, tol, (c.b - c.a) / width,
                            max_depth, st);
  }
  return {static_cast<double>(st.sum), static_cast<double>(st.err), st.ok};
}

/// Long double result variant used where cancellation matters.
struct QuadResultL {
  long double value = 0.0L;
  long double abs_error = 0.0L;
  bool converged = true;
};

/// Vector-valued adaptive Simpson: `f` returns a valarray of fixed length
/// `dim`; each component gets its own relative tolerance.
template <class F>
std::vector<QuadResultL> adaptive_simpson_vec(F&& f, std::size_t dim, double a, double b,
                                              int panels, double rel_tol, double abs_floor,
                                              std::span<const double> breaks = {},
                                              int max_depth = 40) {
  using V = std::valarray<long double>;
  const auto pieces = make_panels(a, b, breaks, panels);
  struct Cached {
    long double a, b;
    V fa, fm, fb;
  };
  std::vector<Cached> cache;
  cache.reserve(pieces.size());
  V scale(0.0L, dim);
  for (auto [lo, hi] : pieces) {
    Cached c{lo, hi, f(lo), f(0.5L * (lo + hi)), f(hi)};
    scale += (hi - lo) / 6.0L * (std::abs(c.fa) + 4.0L * std::abs(c.fm) + std::abs(c.fb));
    cache.push_back(std::move(c));
  }
  V tol = static_cast<long double>(rel_tol) * scale;
  for (auto& t : tol) t = std::max<long double>(t, abs_floor);
  const long double width = static_cast<long double>(b) - a;
  detail::SimpsonState<V> st{V(0.0L, dim), V(0.0L, dim), true};
  std::vector<QuadResultL> out(dim);
  for (const auto& c : cache) {
    const V whole = (c.b - c.a) / 6.0L * (c.fa + 4.0L * c.fm + c.fb);
    detail::simpson_recurse(f, c.a, c.b, c.fa, c.fm, c.fb, whole, tol, (c.b - c.a) / width,
                            max_depth, st);
  }
  for (std::size_t i = 0; i < dim; ++i) out[i] = {st.sum[i], st.err[i], st.ok};
  return out;
}

/// E[g(Y)] for Y ~ N(0,1) by adaptive Simpson. The truncation half-width
/// starts at `halfwidth` and grows in steps of halfwidth/3 while the newest
/// bands still carry more than `rel_tol` of the mass (heavy integrands like
/// e^{y^2/3}). Small steps keep g from overflowing before the bands are
/// negligible.
template <class F>
QuadResult gaussian_expectation(F&& g, double rel_tol = 1e-12, double halfwidth = 12.0,
                                std::span<const double> breaks = {}) {
  auto integrand = [&](long double y) -> long double {
    return static_cast<long double>(g(static_cast<double>(y))) * normal_pdf(y);
  };
  QuadResult core = adaptive_simpson(integrand, -halfwidth, halfwidth, 200, rel_tol, 0.0, breaks);
  const double step = halfwidth / 3.0;
  double hw = halfwidth;
  for (int it = 0; it < 30; ++it) {
    const double floor = 1e-3 * rel_tol * std::fabs(core.value);
    const QuadResult lo = adaptive_simpson(integrand, -hw - step, -hw, 20, rel_tol, floor);
    const QuadResult hi = adaptive_simpson(integrand, hw, hw + step, 20, rel_tol, floor);
    const double band = lo.value + hi.value;
    if (!std::isfinite(band)) break;
    core.value += band;
    core.abs_error += lo.abs_error + hi.abs_error;
    core.converged = core.converged && lo.converged && hi.converged;
    hw += step;
    if (std::fabs(band) <= rel_tol * std::max(1.0, std::fabs(core.value))) return core;
  }
  core.converged = false;
  return core;
}

}  // namespace xmem
