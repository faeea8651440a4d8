#include "xmem/zdist.hpp"

#include <cmath>
#include <sstream>

#include "xmem/errors.hpp"
#include "xmem/numeric.hpp"

namespace xmem {

const char* to_string(ZFamily f) {
  switch (f) {
    case ZFamily::gaussian: return "gaussian";
    case ZFamily::pareto: return "pareto";
    case ZFamily::exponential: return "exponential";
    case ZFamily::rademacher: return "rademacher";
  }
  return "?";
}

ZDistribution ZDistribution::gaussian() { return {}; }

ZDistribution ZDistribution::pareto(double alpha, bool symmetric, double x_min) {
  ZDistribution z;
  z.family = ZFamily::pareto;
  z.alpha = alpha;
  z.symmetric = symmetric;
  // Median of a Pareto law is x_min 2^{1/alpha}.
  z.x_min = x_min > 0.0 ? x_min : std::pow(2.0, -1.0 / alpha);
  z.validate();
  return z;
}

ZDistribution ZDistribution::exponential(double lambda) {
  ZDistribution z;
  z.family = ZFamily::exponential;
  z.lambda = lambda;
  z.validate();
  return z;
}

ZDistribution ZDistribution::rademacher() {
  ZDistribution z;
  z.family = ZFamily::rademacher;
  return z;
}

void ZDistribution::validate() const {
  if (family == ZFamily::pareto && (!(alpha > 0.0) || !(x_min > 0.0))) {
    throw DomainError("pareto: alpha and x_min must be > 0");
  }
  if (family == ZFamily::exponential && !(lambda > 0.0)) {
    throw DomainError("exponential: lambda must be > 0");
  }
}

double ZDistribution::tail(double z) const {
  switch (family) {
    case ZFamily::gaussian: return normal_tail(z);
    case ZFamily::exponential: return z <= 0.0 ? 1.0 : std::exp(-lambda * z);
    case ZFamily::rademacher: return z < -1.0 ? 1.0 : (z < 1.0 ? 0.5 : 0.0);
    case ZFamily::pareto: {
      auto one_sided = [&](double x) { return x <= x_min ? 1.0 : std::pow(x_min / x, alpha); };
      if (!symmetric) return one_sided(z);
      return z >= 0.0 ? 0.5 * one_sided(z) : 1.0 - 0.5 * one_sided(-z);
    }
  }
  return 0.0;
}

double ZDistribution::below(double z) const {
  switch (family) {
    case ZFamily::gaussian: return normal_cdf(z);
    case ZFamily::exponential: return z <= 0.0 ? 0.0 : -std::expm1(-lambda * z);
    case ZFamily::rademacher: return z <= -1.0 ? 0.0 : (z <= 1.0 ? 0.5 : 1.0);
    case ZFamily::pareto:
      if (symmetric) return tail(-z);
      return z <= x_min ? 0.0 : 1.0 - std::pow(x_min / z, alpha);
  }
  return 0.0;
}

bool ZDistribution::is_symmetric() const {
  return family == ZFamily::gaussian || family == ZFamily::rademacher ||
         (family == ZFamily::pareto && symmetric);
}

std::vector<double> ZDistribution::kinks() const {
  switch (family) {
    case ZFamily::gaussian: return {};
    case ZFamily::exponential: return {0.0};
    case ZFamily::rademacher: return {-1.0, 1.0};
    case ZFamily::pareto:
      if (symmetric) return {-x_min, x_min};
      return {x_min};
  }
  return {};
}

double ZDistribution::sample(std::mt19937_64& rng) const {
  switch (family) {
    case ZFamily::gaussian: return std::normal_distribution<double>(0.0, 1.0)(rng);
    case ZFamily::exponential: return std::exponential_distribution<double>(lambda)(rng);
    case ZFamily::rademacher: return (rng() >> 63) ? 1.0 : -1.0;
    case ZFamily::pareto: {
      // 1 - U in (0, 1] keeps the power finite.
      const double u = 1.0 - std::generate_canonical<double, 53>(rng);
      const double x = x_min * std::pow(u, -1.0 / alpha);
      if (!symmetric) return x;
      return (rng() >> 63) ? x : -x;
    }
  }
  return 0.0;
}

std::string ZDistribution::describe() const {
  std::ostringstream os;
  os << to_string(family);
  if (family == ZFamily::pareto) {
    os << "(alpha=" << shortest(alpha) << ",x_min=" << shortest(x_min) << (symmetric ? ",symmetric" : "") << ")";
  } else if (family == ZFamily::exponential) {
    os << "(lambda=" << shortest(lambda) << ")";
  }
  return os.str();
}

}  // namespace xmem
