#include "xmem/bigauss.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "xmem/errors.hpp"
#include "xmem/hermite.hpp"
#include "xmem/numeric.hpp"

namespace xmem {

void IndicatorCovInput::validate() const {
  if (!(std::fabs(r) < 1.0)) throw DomainError("indicator covariance: |r| must be < 1");
  if (!std::isfinite(u) || !std::isfinite(v)) throw DomainError("indicator covariance: non-finite level");
}

double indicator_cov_integral(const IndicatorCovInput& in, double tol) {
  in.validate();
  if (in.r == 0.0) return 0.0;
  const long double u = in.u, v = in.v;
  const long double uu = u * u + v * v, uv = u * v;
  auto integrand = [&](long double theta) -> long double {
    const long double s = std::sin(theta);
    const long double c = std::cos(theta);
    return std::exp(-(uu - 2.0L * s * uv) / (2.0L * c * c));
  };
  const double end = std::asin(in.r);
  const double lo = std::min(0.0, end), hi = std::max(0.0, end);
  const QuadResult q = adaptive_simpson(integrand, lo, hi, 16, 0.0, tol * 2.0 * std::numbers::pi);
  if (!q.converged) throw QuadratureError("indicator_cov_integral: tolerance not reached");
  const double sign = end < 0.0 ? -1.0 : 1.0;
  return sign * q.value / (2.0 * std::numbers::pi);
}

double indicator_cov_series(const IndicatorCovInput& in, int terms) {
  in.validate();
  if (terms < 1) throw DomainError("indicator_cov_series: need at least one term");
  std::vector<double> hu(terms), hv(terms);
  normalized_hermite_all(in.u, hu);
  normalized_hermite_all(in.v, hv);
  const double pu = normal_pdf(in.u), pv = normal_pdf(in.v);
  double rk = 1.0, sum = 0.0;
  for (int k = 1; k <= terms; ++k) {
    rk *= in.r;
    sum += rk / k * (pu * hu[k - 1]) * (pv * hv[k - 1]);
  }
  return sum;
}

SeriesResult indicator_cov_series_adaptive(const IndicatorCovInput& in) {
  in.validate();
  // Cramer: |h_k(x)| phi(x) <= 1.086435 phi(x) e^{x^2/4}, so the tail after K
  // is at most B |r|^{K+1} / ((K+1)(1-|r|)).
  constexpr double kCramer = 1.086435;
  constexpr int kCap = 20000;
  const double envelope = kCramer * kCramer * normal_pdf(in.u) * std::exp(0.25 * in.u * in.u) *
                          normal_pdf(in.v) * std::exp(0.25 * in.v * in.v);
  const double a = std::fabs(in.r);
  int terms = 1;
  for (double ak = a; terms < kCap; ++terms, ak *= a) {
    if (envelope * ak * a / ((terms + 1) * (1.0 - a)) < 1e-16) break;
  }
  return {indicator_cov_series(in, terms), terms};
}

double orthant_oracle(double r, double u, double v) {
  if (!(std::fabs(r) < 1.0)) throw DomainError("orthant_oracle: |r| must be < 1");
  const double x0 = std::max(u, -10.0), y0 = std::max(v, -10.0);
  if (x0 >= 10.0 || y0 >= 10.0) return 0.0;
  const double one_minus = 1.0 - r * r;
  const double norm = 1.0 / (2.0 * std::numbers::pi * std::sqrt(one_minus));
  // Composite Gauss-Legendre on both axes; panels narrower than the ridge width.
  static const GaussRule rule = gauss_legendre_rule(16);
  const double width = std::min(0.5, 0.8 * std::sqrt(one_minus));
  auto axis = [&](double lo) {
    std::vector<double> nodes, weights;
    const int panels = static_cast<int>(std::ceil((10.0 - lo) / width));
    const double h = (10.0 - lo) / panels;
    for (int p = 0; p < panels; ++p) {
      const double mid = lo + (p + 0.5) * h;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        nodes.push_back(mid + 0.5 * h * static_cast<double>(rule.nodes[i]));
        weights.push_back(0.5 * h * static_cast<double>(rule.weights[i]));
      }
    }
    return std::pair{nodes, weights};
  };
  const auto [xs, wx] = axis(x0);
  const auto [ys, wy] = axis(y0);
  const double scale = 1.0 / (2.0 * one_minus);
  long double total = 0.0L;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double row = 0.0;
    const double x = xs[i];
    for (std::size_t j = 0; j < ys.size(); ++j) {
      const double y = ys[j];
      row += wy[j] * std::exp(-(x * x - 2.0 * r * x * y + y * y) * scale);
    }
    total += static_cast<long double>(wx[i]) * row;
  }
  return static_cast<double>(norm * total);
}

double indicator_cov_at_unit_correlation(double u, double v) {
  return normal_tail(std::max(u, v)) - normal_tail(u) * normal_tail(v);
}

double hoeffding_reconstruct(double r, double halfwidth, double step) {
  if (!(std::fabs(r) < 1.0)) throw DomainError("hoeffding_reconstruct: |r| must be < 1");
  if (!(halfwidth > 0.0 && step > 0.0)) throw DomainError("hoeffding_reconstruct: bad grid");
  int intervals = static_cast<int>(std::lround(2.0 * halfwidth / step));
  intervals += intervals % 2;
  const double h = 2.0 * halfwidth / intervals;
  std::vector<double> w(intervals + 1);
  for (int i = 0; i <= intervals; ++i) {
    w[i] = (i == 0 || i == intervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    w[i] *= h / 3.0;
  }
  // Cov(r, u, v) is symmetric in (u, v): visit the lower triangle once.
  std::vector<double> rows(intervals + 1);
  for (int i = 0; i <= intervals; ++i) {
    const double u = -halfwidth + i * h;
    double row = 0.0;
    for (int j = 0; j <= i; ++j) {
      const double v = -halfwidth + j * h;
      const double c = indicator_cov_integral({r, u, v}, 1e-14);
      row += (j == i ? 1.0 : 2.0) * w[j] * c;
    }
    rows[i] = w[i] * row;
  }
  return pairwise_sum(rows);
}

}  // namespace xmem
