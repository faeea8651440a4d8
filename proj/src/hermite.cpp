#include "xmem/hermite.hpp"

#include <cmath>
#include <limits>

#include "xmem/errors.hpp"

namespace xmem {

void normalized_hermite_all(double x, std::span<double> out) {
  if (out.empty()) return;
  out[0] = 1.0;
  if (out.size() == 1) return;
  out[1] = x;
  for (std::size_t k = 1; k + 1 < out.size(); ++k) {
    const double kk = static_cast<double>(k);
    out[k + 1] = (x * out[k] - std::sqrt(kk) * out[k - 1]) / std::sqrt(kk + 1.0);
  }
}

void QuadratureSpec::validate() const {
  if (node_count < 2) throw DomainError("quadrature: node_count must be >= 2");
  if (!(domain_halfwidth > 0.0)) throw DomainError("quadrature: domain_halfwidth must be > 0");
  if (!(rel_tol > 0.0)) throw DomainError("quadrature: rel_tol must be > 0");
}

namespace {

HermiteCoefficients gauss_hermite_coefficients(const RealFunction& f, int k_max, int nodes) {
  auto run = [&](int n) {
    const GaussRule rule = gauss_hermite_rule(n);
    std::vector<long double> acc(k_max + 1, 0.0L);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const long double x = rule.nodes[i];
      const long double fx = static_cast<long double>(f(static_cast<double>(x))) * rule.weights[i];
      long double prev = 1.0L, cur = x;
      acc[0] += fx;
      if (k_max >= 1) acc[1] += fx * x;
      for (int k = 1; k < k_max; ++k) {
        const long double next = x * cur - k * prev;
        prev = cur;
        cur = next;
        acc[k + 1] += fx * cur;
      }
    }
    return acc;
  };
  const auto fine = run(nodes);
  const auto coarse = run(std::max(2, nodes - nodes / 4));
  HermiteCoefficients out;
  out.k_max = k_max;
  out.values.resize(k_max + 1);
  for (int k = 0; k <= k_max; ++k) {
    out.values[k] = static_cast<double>(fine[k]);
    out.quad_error_estimate =
        std::max(out.quad_error_estimate, static_cast<double>(std::fabs(fine[k] - coarse[k])));
  }
  return out;
}

}  // namespace

HermiteCoefficients hermite_coefficients(const RealFunction& f, int k_max,
                                         const QuadratureSpec& quad) {
  if (k_max < 0) throw DomainError("hermite_coefficients: k_max must be >= 0");
  quad.validate();
  if (quad.scheme == QuadScheme::gauss_hermite) {
    return gauss_hermite_coefficients(f, k_max, quad.node_count);
  }
  const std::size_t dim = static_cast<std::size_t>(k_max) + 1;
  auto integrand = [&](long double x) {
    std::valarray<long double> v(dim);
    const long double w = static_cast<long double>(f(static_cast<double>(x))) * normal_pdf(x);
    long double prev = 1.0L, cur = x;
    v[0] = w;
    if (dim > 1) v[1] = w * x;
    for (std::size_t k = 1; k + 1 < dim; ++k) {
      const long double next = x * cur - static_cast<long double>(k) * prev;
      prev = cur;
      cur = next;
      v[k + 1] = w * cur;
    }
    return v;
  };
  // A tiny absolute floor keeps components that vanish identically (odd
  // coefficients of even functions) from driving endless refinement.
  const auto res = adaptive_simpson_vec(integrand, dim, -quad.domain_halfwidth,
                                        quad.domain_halfwidth, (quad.node_count - 1) / 2,
                                        quad.rel_tol, 1e-300, quad.breakpoints);
  HermiteCoefficients out;
  out.k_max = k_max;
  out.values.resize(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    out.values[k] = static_cast<double>(res[k].value);
    out.quad_error_estimate = std::max(out.quad_error_estimate, static_cast<double>(res[k].abs_error));
    out.converged = out.converged && res[k].converged;
  }
  return out;
}

QuadResult hermite_coeff(const RealFunction& f, int k, const QuadratureSpec& quad) {
  if (k < 0) throw DomainError("hermite_coeff: degree must be >= 0");
  quad.validate();
  if (quad.scheme == QuadScheme::gauss_hermite) {
    const auto c = gauss_hermite_coefficients(f, k, quad.node_count);
    return {c.values[k], c.quad_error_estimate, true};
  }
  auto integrand = [&](long double x) -> long double {
    return static_cast<long double>(f(static_cast<double>(x))) * hermite_eval(k, x) * normal_pdf(x);
  };
  return adaptive_simpson(integrand, -quad.domain_halfwidth, quad.domain_halfwidth,
                          (quad.node_count - 1) / 2, quad.rel_tol, 1e-300, quad.breakpoints);
}

RankResult hermite_rank(const RealFunction& f, int k_max, double tol, const QuadratureSpec& quad) {
  if (k_max < 1) throw DomainError("hermite_rank: k_max must be >= 1");
  if (!(tol > 0.0)) throw DomainError("hermite_rank: tol must be > 0");
  quad.validate();

  RankResult out;
  out.k_max = k_max;

  // ||f||^2 on the working domain and on a wider one; a noticeable gain from
  // widening means the weighted square is not integrable.
  auto sq = [&](long double x) -> long double {
    const long double v = f(static_cast<double>(x));
    return v * v * normal_pdf(x);
  };
  const double h = quad.domain_halfwidth;
  const QuadResult core = adaptive_simpson(sq, -h, h, 200, 1e-10, 0.0, quad.breakpoints);
  const QuadResult left = adaptive_simpson(sq, -2 * h, -h, 100, 1e-10);
  const QuadResult right = adaptive_simpson(sq, h, 2 * h, 100, 1e-10);
  const double outer = left.value + right.value;
  out.finite_variance = std::isfinite(core.value) && std::isfinite(outer) &&
                        outer <= 1e-6 * std::max(core.value, 1e-300) + 1e-300;
  out.norm_estimate = out.finite_variance ? std::sqrt(core.value)
                                          : std::numeric_limits<double>::infinity();
  out.threshold = out.finite_variance ? tol * std::max(1.0, out.norm_estimate) : tol;

  const HermiteCoefficients c = hermite_coefficients(f, k_max, quad);
  out.coefficients = c.values;
  for (double v : c.values) {
    if (!std::isfinite(v)) throw QuadratureError("hermite_rank: non-finite Hermite coefficient (f overflows on the domain)");
  }
  if (std::fabs(c.values[0]) > out.threshold) {
    throw DomainError("hermite_rank: function is not centred (<f, H_0> = " +
                      std::to_string(c.values[0]) + ")");
  }
  for (int k = 1; k <= k_max; ++k) {
    if (std::fabs(c.values[k]) > out.threshold) {
      out.rank = k;
      break;
    }
  }
  return out;
}

double half_factorial_ratio(int k) {
  if (k < 1) throw DomainError("half_factorial_ratio: k must be >= 1");
  const double kk = static_cast<double>(k);
  return std::exp(std::lgamma(2.0 * kk + 1.0) - 2.0 * std::lgamma(kk + 1.0) -
                  2.0 * kk * std::numbers::ln2);
}

}  // namespace xmem
