#include <charconv>
#include "xmem/numeric.hpp"

#include "xmem/errors.hpp"

namespace xmem {

std::string shortest(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, p);
}

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kBlock = 16;
  if (values.size() <= kBlock) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

Moments sample_moments(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) throw DomainError("sample_moments: need at least two values");
  Moments m;
  m.count = n;
  m.mean = pairwise_sum(values) / static_cast<double>(n);
  std::vector<double> d2(n), d3(n), d4(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = values[i] - m.mean;
    d2[i] = d * d;
    d3[i] = d2[i] * d;
    d4[i] = d2[i] * d2[i];
  }
  const double nn = static_cast<double>(n);
  const double m2 = pairwise_sum(d2) / nn;
  const double m3 = pairwise_sum(d3) / nn;
  const double m4 = pairwise_sum(d4) / nn;
  m.variance = m2 * nn / (nn - 1.0);
  if (m2 > 0.0) {
    m.skewness = m3 / std::pow(m2, 1.5);
    m.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  }
  return m;
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw DomainError("quantile: empty input");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile: p outside [0,1]");
  std::sort(values.begin(), values.end());
  const double h = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

GaussRule gauss_hermite_rule(int n) {
  if (n < 1) throw DomainError("gauss_hermite_rule: n must be positive");
  // Newton iteration on the orthonormal physicists' recurrence, then rescaled
  // to the N(0,1) weight.
  const long double pim4 = 0.7511255444649424828587030047762276930510L;  // pi^(-1/4)
  std::vector<long double> x(n), w(n);
  const int m = (n + 1) / 2;
  long double z = 0.0L;
  for (int i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0L * n + 1.0L) - 1.85575L * std::pow(2.0L * n + 1.0L, -0.16667L);
    } else if (i == 1) {
      z -= 1.14L * std::pow(static_cast<long double>(n), 0.426L) / z;
    } else if (i == 2) {
      z = 1.86L * z - 0.86L * x[0];
    } else if (i == 3) {
      z = 1.91L * z - 0.91L * x[1];
    } else {
      z = 2.0L * z - x[i - 2];
    }
    long double pp = 0.0L;
    for (int it = 0; it < 100; ++it) {
      long double p1 = pim4, p2 = 0.0L;
      for (int j = 0; j < n; ++j) {
        const long double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0L / (j + 1)) * p2 - std::sqrt(static_cast<long double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0L * n) * p2;
      const long double z1 = z;
      z = z1 - p1 / pp;
      if (std::fabs(z - z1) <= 1e-17L * std::max(1.0L, std::fabs(z))) break;
    }
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = 2.0L / (pp * pp);
    w[n - 1 - i] = w[i];
  }
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const long double sqrt2 = std::sqrt(2.0L);
  const long double sqrtpi = std::sqrt(3.14159265358979323846264338327950288L);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = x[n - 1 - i] * sqrt2;
    rule.weights[i] = w[n - 1 - i] / sqrtpi;
  }
  return rule;
}

GaussRule gauss_legendre_rule(int n) {
  if (n < 1) throw DomainError("gauss_legendre_rule: n must be positive");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const long double pi = 3.14159265358979323846264338327950288L;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    long double z = std::cos(pi * (i + 0.75L) / (n + 0.5L));
    long double pp = 0.0L;
    for (int it = 0; it < 100; ++it) {
      long double p1 = 1.0L, p2 = 0.0L;
      for (int j = 0; j < n; ++j) {
        const long double p3 = p2;
        p2 = p1;
        p1 = ((2.0L * j + 1.0L) * z * p2 - j * p3) / (j + 1);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0L);
      const long double z1 = z;
      z = z1 - p1 / pp;
      if (std::fabs(z - z1) <= 1e-18L) break;
    }
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = 2.0L / ((1.0L - z * z) * pp * pp);
    rule.weights[n - 1 - i] = rule.weights[i];
  }
  return rule;
}

std::vector<std::pair<long double, long double>> make_panels(long double a, long double b,
                                                             std::span<const double> breaks,
                                                             int panels) {
  if (!(b > a)) throw DomainError("quadrature: empty interval");
  panels = std::max(panels, 1);
  std::vector<long double> cuts{a};
  std::vector<double> sorted(breaks.begin(), breaks.end());
  std::sort(sorted.begin(), sorted.end());
  for (double c : sorted) {
    if (c > a && c < b && c > cuts.back()) cuts.push_back(c);
  }
  cuts.push_back(b);
  std::vector<std::pair<long double, long double>> out;
  const long double width = b - a;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const long double lo = cuts[i], hi = cuts[i + 1];
    const int k = std::max(2, static_cast<int>(std::ceil(panels * (hi - lo) / width)));
    for (int j = 0; j < k; ++j) {
      const long double p = lo + (hi - lo) * j / k;
      const long double q = (j + 1 == k) ? hi : lo + (hi - lo) * (j + 1) / k;
      out.emplace_back(p, q);
    }
  }
  return out;
}

}  // namespace xmem
