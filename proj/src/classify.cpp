#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "xmem/bigauss.hpp"
#include "xmem/errors.hpp"
#include "xmem/fieldsim.hpp"
#include "xmem/hermite.hpp"
#include "xmem/memory.hpp"
#include "xmem/numeric.hpp"

namespace xmem {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// sup_x |H_k(x)| exp(-x^2/4) / sqrt(k!) over all k (Cramer's inequality).
constexpr double kCramer = 1.086435;

struct Level {
  double x;  // G^-(u)
  double weight;
};

// Atoms of mu mapped through G^-, dropping those outside the image of G.
std::vector<Level> preimages(const Transform& g, const FiniteMeasure& mu) {
  if (g.kind() == TransformKind::even_composed && g.image_lo() < 0.0) {
    throw DomainError("memory series need an even transform with nonnegative base");
  }
  std::vector<Level> out;
  for (const auto& a : mu.discretized()) {
    if (!in_image_closure(g, a.location)) continue;
    out.push_back({generalized_inverse(g, a.location), a.weight});
  }
  return out;
}

struct Term {
  int power;           // k in int rho^k
  double coefficient;  // multiplies int rho^k
  double strength;     // normalized coefficient squared, compared with tol^2
};

// int_P^inf U(s)/s ds with U nonincreasing, via s = P e^x.
double tail_integral(const CovarianceModel& model, double p) {
  if (!std::isfinite(rho_power_upper_bound(model, p))) return kInf;
  auto f = [&](long double x) -> long double {
    return rho_power_upper_bound(model, p * std::exp(static_cast<double>(x)));
  };
  return adaptive_simpson(f, 0.0, 90.0, 64, 1e-8).value;
}

// Estimate of the terms past the truncation when the last half of the nonzero
// terms follows a clean power law c_i ~ A i^p with p < -1; zero otherwise.
double extrapolated_tail(const std::vector<std::pair<int, double>>& contrib, int last_index) {
  std::vector<double> x, y;
  for (const auto& [i, c] : contrib) {
    if (2 * i > last_index && c > 0.0) {
      x.push_back(std::log(static_cast<double>(i)));
      y.push_back(std::log(c));
    }
  }
  if (x.size() < 8) return 0.0;
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    mx += x[j];
    my += y[j];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    sxx += (x[j] - mx) * (x[j] - mx);
    sxy += (x[j] - mx) * (y[j] - my);
  }
  const double p = sxy / sxx;
  const double log_a = my - p * mx;
  double worst = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) worst = std::max(worst, std::fabs(y[j] - log_a - p * x[j]));
  if (!(p < -1.05) || worst > 0.02) return 0.0;
  // Nonzero terms arrive every `spacing` indices; sum ~ (1/spacing) int_{N + spacing/2}^inf A t^p dt.
  const double spacing = (std::exp(x.back()) - std::exp(x.front())) / (n - 1.0);
  const double start = last_index + 0.5 * spacing;
  return std::exp(log_a) * std::pow(start, p + 1.0) / (-(p + 1.0)) / spacing;
}

MemoryVerdict decide(const std::vector<Term>& terms, const CovarianceModel& model,
                     const FiniteMeasure& mu, double tol,
                     const std::function<double(int last_power)>& tail_bound) {
  MemoryVerdict out{Verdict::SRD, 0.0, 0.0, 0.0, std::nullopt, mu, static_cast<int>(terms.size())};
  const double cut = tol * tol;
  std::optional<Term> lrd, boundary;
  std::vector<double> finite;
  std::vector<std::pair<int, double>> contrib;
  finite.reserve(terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const Term& t = terms[i];
    // Coefficients at or below the cut count as zero.
    if (!(t.strength > cut)) continue;
    const double integral = rho_power_integral(model, t.power);
    if (std::isfinite(integral)) {
      finite.push_back(t.coefficient * integral);
      contrib.emplace_back(static_cast<int>(i) + 1, finite.back());
    } else if (at_divergence_boundary(model, t.power)) {
      if (!boundary) boundary = t;
    } else if (!lrd) {
      lrd = t;
    }
  }
  out.partial_sum = pairwise_sum(finite);
  const int last = terms.empty() ? 0 : terms.back().power;

  if (lrd) {
    out.verdict = Verdict::LRD;
    out.certificate = DivergenceCertificate{lrd->power, "k*eta <= d", lrd->coefficient};
  } else if (boundary) {
    out.verdict = Verdict::BOUNDARY;
    out.certificate = DivergenceCertificate{boundary->power, "k*eta = d", boundary->coefficient};
  } else if (!std::isfinite(rho_power_upper_bound(model, last + 1))) {
    out.verdict = Verdict::INCONCLUSIVE;
  }
  if (out.verdict == Verdict::LRD || out.verdict == Verdict::BOUNDARY) {
    out.series_value = kInf;
    out.tail_bound = kInf;
  } else if (out.verdict == Verdict::INCONCLUSIVE) {
    out.series_value = out.partial_sum;
    out.tail_bound = kInf;
  } else {
    out.tail_bound = tail_bound(last);
    const double estimate = extrapolated_tail(contrib, static_cast<int>(terms.size()));
    out.series_value = out.partial_sum + std::min(estimate, out.tail_bound);
  }
  return out;
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::SRD: return "SRD";
    case Verdict::LRD: return "LRD";
    case Verdict::BOUNDARY: return "BOUNDARY";
    case Verdict::INCONCLUSIVE: return "INCONCLUSIVE";
  }
  return "?";
}

int severity(Verdict v) {
  switch (v) {
    case Verdict::SRD: return 0;
    case Verdict::INCONCLUSIVE: return 1;
    case Verdict::BOUNDARY: return 2;
    case Verdict::LRD: return 3;
  }
  return 0;
}

double bk_coefficient(const Transform& g, const FiniteMeasure& mu, int k) {
  if (k < 0) throw DomainError("bk_coefficient: k must be >= 0");
  long double s = 0.0L;
  for (const auto& l : preimages(g, mu)) {
    const long double x = l.x;
    s += l.weight * hermite_eval(k, x) * normal_pdf(x);
  }
  return static_cast<double>(s * s);
}

std::vector<double> bk_normalized(const Transform& g, const FiniteMeasure& mu, int k_max) {
  if (k_max < 0) throw DomainError("bk_normalized: k_max must be >= 0");
  std::vector<double> acc(k_max + 1, 0.0), h(k_max + 1);
  for (const auto& l : preimages(g, mu)) {
    normalized_hermite_all(l.x, h);
    const double w = l.weight * normal_pdf(l.x);
    for (int k = 0; k <= k_max; ++k) acc[k] += w * h[k];
  }
  for (double& a : acc) a *= a;
  return acc;
}

MemoryVerdict classify_subordinated(const Transform& g, const CovarianceModel& model,
                                    const FiniteMeasure& mu, int k_max, double tol) {
  if (k_max < 2) throw DomainError("classify_subordinated: K_max must be >= 2");
  if (!(tol > 0.0)) throw DomainError("classify_subordinated: tol must be > 0");
  model.validate();
  if (!model.nonnegative()) {
    throw DomainError("classify_subordinated: the series criteria need rho >= 0");
  }
  const double mass2 = mu.total_mass() * mu.total_mass();
  const std::vector<double> b = bk_normalized(g, mu, k_max);

  // Cramer-type bound b_k / k! <= B for every k.
  double envelope = 0.0;
  for (const auto& l : preimages(g, mu)) envelope += l.weight * std::exp(-0.25 * l.x * l.x);
  const double bound_b = std::pow(kCramer * kInvSqrt2Pi * envelope, 2);

  std::vector<Term> terms;
  const bool even = g.kind() == TransformKind::even_composed;
  if (!even) {
    for (int k = 1; k <= k_max + 1; ++k) {
      terms.push_back({k, b[k - 1] / k, b[k - 1] / mass2});
    }
    return decide(terms, model, mu, tol, [&](int last) {
      return bound_b * tail_integral(model, last);
    });
  }
  for (int k = 1; 2 * k - 1 <= k_max; ++k) {
    terms.push_back({2 * k, 4.0 * b[2 * k - 1] / (2 * k), b[2 * k - 1] / mass2});
  }
  return decide(terms, model, mu, tol, [&](int last) {
    return 2.0 * bound_b * tail_integral(model, last);
  });
}

namespace {

void require_volatility_inputs(const Transform& g, const FiniteMeasure& mu) {
  if (!mu.is_atomic()) throw DomainError("volatility series: measure must be atomic");
  if (g.image_lo() < 0.0) throw DomainError("volatility series: G must be nonnegative");
}

}  // namespace

std::vector<double> volatility_coefficients(const Transform& g, const ZDistribution& z,
                                            const FiniteMeasure& mu, int k_max) {
  require_volatility_inputs(g, mu);
  QuadratureSpec quad;
  for (const auto& a : mu.atoms()) {
    for (double x : conditional_exceedance_breaks(g, z, a.location)) quad.breakpoints.push_back(x);
  }
  std::sort(quad.breakpoints.begin(), quad.breakpoints.end());
  auto f = [&](double y) {
    double s = 0.0;
    for (const auto& a : mu.atoms()) s += a.weight * conditional_exceedance(g, z, a.location, y);
    return s;
  };
  const auto c = hermite_coefficients(f, k_max, quad);
  if (!c.converged) throw QuadratureError("volatility_coefficients: quadrature did not converge");
  return c.values;
}

MemoryVerdict volatility_memory_series(const Transform& g, const ZDistribution& z,
                                       const CovarianceModel& model, const FiniteMeasure& mu,
                                       int k_max, double tol) {
  require_volatility_inputs(g, mu);
  if (k_max < 2) throw DomainError("volatility_memory_series: K_max must be >= 2");
  model.validate();
  if (!model.nonnegative()) throw DomainError("volatility_memory_series: need rho >= 0");
  const double mass2 = mu.total_mass() * mu.total_mass();
  const std::vector<double> c = volatility_coefficients(g, z, mu, k_max);

  std::vector<Term> terms;
  double captured = c[0] * c[0];
  for (int k = 1; k <= k_max; ++k) {
    const double a = c[k] == 0.0 ? 0.0 : std::exp(2.0 * std::log(std::fabs(c[k])) - log_factorial(k));
    captured += a;
    terms.push_back({k, a, a / mass2});
  }

  // Bessel: the coefficients past the truncation carry at most the energy
  // not yet captured, and int rho^k is nonincreasing in k.
  std::vector<double> breaks;
  for (const auto& a : mu.atoms()) {
    for (double x : conditional_exceedance_breaks(g, z, a.location)) breaks.push_back(x);
  }
  std::sort(breaks.begin(), breaks.end());
  auto sq = [&](long double y) -> long double {
    long double s = 0.0L;
    for (const auto& a : mu.atoms()) s += a.weight * conditional_exceedance(g, z, a.location, static_cast<double>(y));
    return s * s * normal_pdf(y);
  };
  const QuadResult energy = adaptive_simpson(sq, -12.0, 12.0, 100, 1e-13, 0.0, breaks);
  const double residual = std::max(0.0, energy.value - captured) + energy.abs_error + 1e-14 * mass2;

  return decide(terms, model, mu, tol, [&](int last) {
    return rho_power_upper_bound(model, last + 1) * residual;
  });
}

Sigma2Result sigma2_numeric(const std::function<double(double)>& r_of_t, const FiniteMeasure& mu,
                            double cutoff, double lag_step, const Sigma2Options& opts) {
  if (!(cutoff > 0.0) || !(lag_step > 0.0)) throw DomainError("sigma2_numeric: bad lag grid");
  if (opts.dim != 1 && opts.dim != 2) throw DomainError("sigma2_numeric: dimension must be 1 or 2");
  const auto atoms = mu.discretized();

  auto kernel = [&](double r) {
    std::vector<double> parts;
    parts.reserve(atoms.size() * atoms.size());
    for (const auto& a : atoms) {
      for (const auto& b : atoms) {
        const double c = std::fabs(r) >= 1.0
                             ? indicator_cov_at_unit_correlation(a.location, b.location)
                             : indicator_cov_integral({r, a.location, b.location});
        parts.push_back(a.weight * b.weight * std::fabs(c));
      }
    }
    return pairwise_sum(parts);
  };
  const int d = opts.dim;
  const double surface = d == 1 ? 2.0 : 2.0 * std::numbers::pi;

  Sigma2Result out;
  std::vector<double> parts;
  double at_cut = 0.0, at_half = 0.0;
  if (!opts.lattice) {
    const int steps = static_cast<int>(std::ceil(cutoff / lag_step));
    const double h = cutoff / steps;
    parts.resize(steps + 1);
    for (int i = 0; i <= steps; ++i) {
      const double t = i * h;
      const double w = (i == 0 || i == steps) ? 0.5 * h : h;
      parts[i] = w * surface * std::pow(t, d - 1) * kernel(r_of_t(t));
    }
    at_cut = kernel(r_of_t(cutoff));
    at_half = kernel(r_of_t(0.5 * cutoff));
  } else {
    const int reach = static_cast<int>(std::floor(cutoff));
    if (d == 1) {
      for (int t = 1; t <= reach; ++t) parts.push_back(2.0 * kernel(r_of_t(t)));
    } else {
      for (int i = -reach; i <= reach; ++i) {
        for (int j = -reach; j <= reach; ++j) {
          const double r = std::hypot(i, j);
          if ((i || j) && r <= reach) parts.push_back(kernel(r_of_t(r)));
        }
      }
    }
    at_cut = kernel(r_of_t(reach));
    at_half = kernel(r_of_t(0.5 * reach));
  }
  out.value = pairwise_sum(parts);

  // Tail: kernel ~ t^{-p} past the cutoff, p from the last octave.
  if (at_cut > 0.0 && at_half > 0.0) {
    const double p = std::log2(at_half / at_cut);
    out.tail_estimate = p > d ? surface * at_cut * std::pow(cutoff, d) / (p - d) : kInf;
  }
  out.tail_warning = out.tail_estimate > 0.01 * out.value;
  return out;
}

}  // namespace xmem
