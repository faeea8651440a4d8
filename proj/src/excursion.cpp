#include "xmem/excursion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "xmem/errors.hpp"
#include "xmem/parallel.hpp"

namespace xmem {

double excursion_volume(std::span<const double> values, double u, double cell_volume) {
  std::size_t count = 0;
  for (double v : values) count += v > u;
  return cell_volume * static_cast<double>(count);
}

double excursion_volume(const FieldSample& s, double u) {
  return excursion_volume(s.values, u, s.cell_volume);
}

double normalized_stat(const FieldSample& s, double u, double tail) {
  if (!(tail >= 0.0 && tail <= 1.0)) throw DomainError("normalized_stat: tail must lie in [0, 1]");
  const double total = static_cast<double>(s.values.size());
  return (excursion_volume(s, u) - total * tail) / std::sqrt(total);
}

ExcursionStat excursion_stat(const FieldSample& s, double u, double tail) {
  return {u, excursion_volume(s, u), normalized_stat(s, u, tail), s.n, s.dim};
}

double ScalingReport::combined_stderr() const {
  return std::hypot(exponent_stderr, sampling_stderr);
}

ScalingReport scaling_exponent(std::span<const double> n_values, std::span<const double> values,
                               int replicates) {
  const std::size_t m = n_values.size();
  if (m != values.size()) throw DomainError("scaling_exponent: size mismatch");
  if (m < 3) throw DomainError("scaling_exponent: need at least 3 window sizes");
  for (std::size_t i = 0; i < m; ++i) {
    if (!(n_values[i] > 0.0)) throw DomainError("scaling_exponent: window sizes must be positive");
    if (i > 0 && !(n_values[i] > n_values[i - 1])) throw DomainError("scaling_exponent: window sizes must increase");
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
      throw DomainError("scaling_exponent: dispersions must be positive and finite");
    }
  }
  if (n_values[m - 1] < 8.0 * n_values[0]) throw DomainError("scaling_exponent: window sizes must span a factor of 8");

  std::vector<double> x(m), y(m);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    x[i] = std::log2(n_values[i]);
    y[i] = std::log2(values[i]);
    mx += x[i];
    my += y[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  ScalingReport r;
  r.n_values.assign(n_values.begin(), n_values.end());
  r.variances.assign(values.begin(), values.end());
  r.replicates = replicates;
  r.exponent = sxy / sxx;
  r.intercept = my - r.exponent * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double e = y[i] - (r.intercept + r.exponent * x[i]);
    ssr += e * e;
  }
  r.exponent_stderr = std::max(std::sqrt(ssr / static_cast<double>(m - 2) / sxx),
                               std::numeric_limits<double>::epsilon());
  return r;
}

const EnsembleCell& EnsembleResult::cell(std::size_t level_index, std::size_t n_index) const {
  return cells.at(level_index * n_values.size() + n_index);
}

ScalingReport EnsembleResult::scaling(std::size_t level_index) const {
  std::vector<double> ns, vs;
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    ns.push_back(n_values[i]);
    vs.push_back(cell(level_index, i).volume_variance);
  }
  ScalingReport r = scaling_exponent(ns, vs, replicates);
  // Var(log s^2) ~ (2/(R-1) + kurtosis/R); propagate through the OLS weights.
  double mx = 0.0;
  for (double n : ns) mx += std::log2(n);
  mx /= ns.size();
  double sxx = 0.0;
  for (double n : ns) sxx += std::pow(std::log2(n) - mx, 2);
  double var = 0.0;
  const double ln2sq = std::numbers::ln2 * std::numbers::ln2;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double c = (std::log2(ns[i]) - mx) / sxx;
    const double kurt = cell(level_index, i).moments.excess_kurtosis;
    const double rel = std::max(0.0, 2.0 / (replicates - 1) + kurt / replicates);
    var += c * c * rel / ln2sq;
  }
  r.sampling_stderr = std::sqrt(var);
  return r;
}

EnsembleResult mc_ensemble(const EnsembleConfig& config) {
  const auto& model = config.model;
  model.validate();
  if (config.levels.empty()) throw DomainError("mc_ensemble: no levels");
  if (config.n_values.empty()) throw DomainError("mc_ensemble: no window sizes");
  if (config.replicates < 2) throw DomainError("mc_ensemble: need at least 2 replicates");

  EnsembleResult out;
  out.levels = config.levels;
  out.n_values = config.n_values;
  out.dim = model.dim;
  out.replicates = config.replicates;

  const std::size_t nl = config.levels.size();
  std::vector<double> tails(nl);
  for (std::size_t l = 0; l < nl; ++l) tails[l] = marginal_tail(config.transform, config.z, config.levels[l]);

  const std::size_t reps = static_cast<std::size_t>(config.replicates);
  out.cells.resize(nl * config.n_values.size());
  for (std::size_t ni = 0; ni < config.n_values.size(); ++ni) {
    const int n = config.n_values[ni];
    const CirculantEmbedding embedding(model, n);
    std::vector<double> stats(nl * reps);
    parallel_for(reps, config.threads, [&](std::size_t r) {
      const RngSpec rng{config.master_seed, (static_cast<std::uint64_t>(ni) << 32) | r};
      const FieldSample y = embedding.sample(rng);
      const FieldSample x = config.z ? volatility_field(y, config.transform, *config.z, rng)
                                     : subordinate(y, config.transform);
      for (std::size_t l = 0; l < nl; ++l) {
        stats[l * reps + r] = normalized_stat(x, config.levels[l], tails[l]);
      }
    });
    const double volume = std::pow(static_cast<double>(n), model.dim);
    for (std::size_t l = 0; l < nl; ++l) {
      EnsembleCell& c = out.cells[l * config.n_values.size() + ni];
      c.level = config.levels[l];
      c.n = n;
      c.tail = tails[l];
      c.moments = sample_moments(std::span<const double>(stats).subspan(l * reps, reps));
      c.volume_variance = c.moments.variance * volume;
    }
  }
  return out;
}

PartialSumReport partial_sum_scaling(const PartialSumConfig& config) {
  if (!(config.alpha > 1.0 && config.alpha < 2.0)) {
    throw DomainError("partial_sum_scaling: alpha must lie in (1, 2)");
  }
  if (config.model.dim != 1) throw DomainError("partial_sum_scaling: needs a one-dimensional model");
  if (config.replicates < 4) throw DomainError("partial_sum_scaling: need at least 4 replicates");
  if (!(config.q_lo >= 0.0 && config.q_lo < config.q_hi && config.q_hi <= 1.0)) {
    throw DomainError("partial_sum_scaling: bad quantile pair");
  }
  const Transform g = Transform::exp_sq(config.alpha);
  PartialSumReport out;
  const QuadResult mean = gaussian_expectation([&](double y) { return g(y); });
  if (!mean.converged) throw QuadratureError("partial_sum_scaling: E X quadrature did not converge");
  out.mean = mean.value;
  out.predicted = std::max(1.0 / config.alpha, 1.0 - config.model.tail_exponent());

  const std::size_t reps = static_cast<std::size_t>(config.replicates);
  std::vector<double> ns;
  for (std::size_t ni = 0; ni < config.n_values.size(); ++ni) {
    const int n = config.n_values[ni];
    const CirculantEmbedding embedding(config.model, n);
    std::vector<double> sums(reps);
    parallel_for(reps, config.threads, [&](std::size_t r) {
      const RngSpec rng{config.master_seed, (static_cast<std::uint64_t>(ni) << 32) | r};
      const FieldSample y = embedding.sample(rng);
      std::vector<double> centred(y.values.size());
      for (std::size_t i = 0; i < centred.size(); ++i) centred[i] = g(y.values[i]) - out.mean;
      sums[r] = pairwise_sum(centred);
    });
    out.iqr.push_back(quantile(sums, config.q_hi) - quantile(sums, config.q_lo));
    ns.push_back(n);
  }
  out.scaling = scaling_exponent(ns, out.iqr, config.replicates);
  return out;
}

CltTheory xi_and_rank(const Transform& g, const std::optional<ZDistribution>& z, double u,
                      const CovarianceModel& model, int k_max, double tol) {
  const double tail = marginal_tail(g, z, u);
  QuadratureSpec quad;
  std::function<double(double)> xi;
  std::function<double(double)> exceed;
  if (z) {
    quad.breakpoints = conditional_exceedance_breaks(g, *z, u);
    exceed = [&g, zz = *z, u](double y) { return conditional_exceedance(g, zz, u, y); };
  } else {
    if (in_image_closure(g, u) && std::isfinite(u)) {
      const double x = generalized_inverse(g, u);
      if (std::isfinite(x)) {
        quad.breakpoints.push_back(x);
        if (g.kind() == TransformKind::even_composed && x != 0.0) quad.breakpoints.push_back(-x);
      }
    }
    std::sort(quad.breakpoints.begin(), quad.breakpoints.end());
    exceed = [&g, u](double y) { return g(y) > u ? 1.0 : 0.0; };
  }
  xi = [&exceed, tail](double y) { return exceed(y) - tail; };

  CltTheory out;
  out.rank = hermite_rank(xi, k_max, tol, quad);
  out.q = out.rank.rank;
  if (!out.q) {
    // No coefficient up to k_max: accept xi = 0 only if it vanishes pointwise.
    double worst = 0.0;
    for (int i = 0; i <= 2000; ++i) worst = std::max(worst, std::fabs(xi(-10.0 + 0.01 * i)));
    if (worst > tol) {
      throw NumericError("xi_and_rank: no Hermite coefficient above tolerance up to k_max, "
                         "but xi does not vanish");
    }
    out.xi_zero = true;
    auto chi = [&exceed](double y) {
      const double p = exceed(y);
      return p * (1.0 - p);
    };
    const QuadResult q = gaussian_expectation(chi, 1e-12, 12.0, quad.breakpoints);
    out.sigma2 = q.value;
  }
  const int d = model.dim;
  const double eta = model.tail_exponent();
  if (out.xi_zero || !(*out.q * eta < d)) {
    out.predicted_exponent = d;
  } else {
    out.predicted_exponent = 2.0 * d - *out.q * eta;
  }
  return out;
}

}  // namespace xmem
