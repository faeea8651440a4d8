#include "xmem/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "xmem/errors.hpp"
#include "xmem/numeric.hpp"

namespace xmem {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

// Lattice shells: counts r2(m) = #{t in Z^2 : |t|^2 = m} for m <= kShellMax.
constexpr int kShellRadius = 64;
constexpr int kShellMax = kShellRadius * kShellRadius;

struct Shells {
  std::vector<int> count;
  long cumulative = 0;  // #{t : |t|^2 <= kShellMax}, origin included
};

const Shells& shells() {
  static const Shells s = [] {
    Shells out;
    out.count.assign(kShellMax + 1, 0);
    for (int i = -kShellRadius; i <= kShellRadius; ++i) {
      for (int j = -kShellRadius; j <= kShellRadius; ++j) {
        const int m = i * i + j * j;
        if (m <= kShellMax) ++out.count[m];
      }
    }
    for (int c : out.count) out.cumulative += c;
    return out;
  }();
  return s;
}

// sum_{t in Z^2, t != 0} g(|t|^2), given the tail integral int_M^inf g(s) ds.
template <class G>
double lattice2_sum(G&& g, double tail_integral) {
  const Shells& sh = shells();
  double sum = 0.0;
  for (int m = 1; m <= kShellMax; ++m) {
    if (sh.count[m]) sum += sh.count[m] * g(static_cast<double>(m));
  }
  // Lattice points beyond the radius behave like area pi * s; the boundary
  // term corrects for the exact count inside the disc.
  const double gm = g(static_cast<double>(kShellMax));
  return sum + kPi * tail_integral + gm * (kPi * kShellMax - static_cast<double>(sh.cumulative));
}

// int_N^inf (1 + t^2)^{-a} dt for N >= 2 by the expansion in 1/t^2.
double cauchy_tail_1d(double a, double n) {
  double coef = 1.0, sum = 0.0;
  for (int j = 0; j < 60; ++j) {
    const double term = coef * std::pow(n, 1.0 - 2.0 * a - 2.0 * j) / (2.0 * a + 2.0 * j - 1.0);
    sum += term;
    if (std::fabs(term) < 1e-18 * std::fabs(sum)) break;
    coef *= -(a + j) / (j + 1.0);
  }
  return sum;
}

double cauchy_continuous(int d, double a) {
  // pi^{d/2} Gamma(a - d/2) / Gamma(a)
  const double half = 0.5 * d;
  return std::exp(half * std::log(kPi) + std::lgamma(a - half) - std::lgamma(a));
}

double cauchy_lattice(int d, double a) {
  if (d == 1) {
    constexpr int kTerms = 2048;
    double sum = 0.0;
    for (int t = 1; t <= kTerms; ++t) {
      const double term = std::pow(1.0 + double(t) * t, -a);
      sum += term;
      if (term < 1e-18 * sum) return 2.0 * sum;
    }
    // Euler-Maclaurin for the remainder from N = kTerms + 1.
    const double n = kTerms + 1.0;
    const double f = std::pow(1.0 + n * n, -a);
    const double df = -2.0 * a * n * std::pow(1.0 + n * n, -a - 1.0);
    return 2.0 * (sum + cauchy_tail_1d(a, n) + 0.5 * f - df / 12.0);
  }
  const double tail = std::pow(1.0 + kShellMax, 1.0 - a) / (a - 1.0);
  return lattice2_sum([a](double s) { return std::pow(1.0 + s, -a); }, tail);
}

double exp_power(int d, double c, bool lattice) {
  if (!lattice) return d == 1 ? 2.0 / c : 2.0 * kPi / (c * c);
  if (d == 1) return 2.0 / std::expm1(c);
  const double r = std::sqrt(static_cast<double>(kShellMax));
  const double tail = 2.0 * std::exp(-c * r) * (r / c + 1.0 / (c * c));
  return lattice2_sum([c](double s) { return std::exp(-c * std::sqrt(s)); }, tail);
}

double fitted_exponent(const CovarianceModel& m) {
  const auto& lags = m.grid_lags;
  const auto& vals = m.grid_values;
  const std::size_t n = lags.size();
  if (vals.back() <= 0.0) return kInf;
  // Least-squares slope of log rho against log r over the upper half of the grid.
  std::vector<double> xs, ys;
  for (std::size_t i = std::max<std::size_t>(1, n / 2); i < n; ++i) {
    if (vals[i] > 0.0) {
      xs.push_back(std::log(lags[i]));
      ys.push_back(std::log(vals[i]));
    }
  }
  if (xs.size() < 2) return 0.0;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= xs.size();
  my /= xs.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return std::max(0.0, -sxy / sxx);
}

double grid_power(const CovarianceModel& m, int k) {
  const double eta = fitted_exponent(m);
  const double last_lag = m.grid_lags.back();
  const double last = m.grid_values.back();
  const int d = m.dim;
  const double kk = static_cast<double>(k);
  if (last > 0.0 && kk * eta <= d * (1.0 + 1e-12)) return kInf;
  auto rk = [&](double r) { return std::pow(m.correlation(r), kk); };

  if (!m.lattice) {
    const double surface = d == 1 ? 2.0 : 2.0 * kPi;
    double body = 0.0;
    constexpr int kSub = 16;
    for (std::size_t i = 0; i + 1 < m.grid_lags.size(); ++i) {
      const double a = m.grid_lags[i], b = m.grid_lags[i + 1], h = (b - a) / kSub;
      for (int j = 0; j < kSub; ++j) {
        const double r0 = a + j * h, r1 = r0 + h;
        const double f0 = std::pow(r0, d - 1) * rk(r0), f1 = std::pow(r1, d - 1) * rk(r1);
        body += 0.5 * h * (f0 + f1);
      }
    }
    const double tail = last > 0.0 ? std::pow(last, kk) * std::pow(last_lag, d) / (kk * eta - d) : 0.0;
    return surface * (body + tail);
  }
  // Lattice: explicit sum inside the grid range, power-law integral beyond.
  const int reach = static_cast<int>(std::floor(last_lag));
  double sum = 0.0;
  if (d == 1) {
    for (int t = 1; t <= reach; ++t) sum += 2.0 * rk(t);
    const double start = reach + 0.5;
    if (last > 0.0) {
      sum += 2.0 * std::pow(last, kk) * std::pow(last_lag, kk * eta) *
             std::pow(start, 1.0 - kk * eta) / (kk * eta - 1.0);
    }
    return sum;
  }
  for (int i = -reach; i <= reach; ++i) {
    for (int j = -reach; j <= reach; ++j) {
      const double r = std::hypot(i, j);
      if ((i || j) && r <= reach) sum += rk(r);
    }
  }
  if (last > 0.0) {
    const double start = reach + 0.5;
    sum += 2.0 * kPi * std::pow(last, kk) * std::pow(last_lag, kk * eta) *
           std::pow(start, 2.0 - kk * eta) / (kk * eta - 2.0);
  }
  return sum;
}

}  // namespace

const char* to_string(CovFamily f) {
  switch (f) {
    case CovFamily::cauchy: return "cauchy";
    case CovFamily::exp_decay: return "exp_decay";
    case CovFamily::user_grid: return "user_grid";
    case CovFamily::white_noise: return "white_noise";
  }
  return "?";
}

CovarianceModel CovarianceModel::cauchy(double eta, int dim, bool lattice) {
  CovarianceModel m;
  m.family = CovFamily::cauchy;
  m.eta = eta;
  m.dim = dim;
  m.lattice = lattice;
  m.validate();
  return m;
}

CovarianceModel CovarianceModel::exp_decay(double lambda, int dim, bool lattice) {
  CovarianceModel m;
  m.family = CovFamily::exp_decay;
  m.lambda = lambda;
  m.dim = dim;
  m.lattice = lattice;
  m.validate();
  return m;
}

CovarianceModel CovarianceModel::user_grid(std::vector<double> lags, std::vector<double> values,
                                           int dim, bool lattice) {
  CovarianceModel m;
  m.family = CovFamily::user_grid;
  m.grid_lags = std::move(lags);
  m.grid_values = std::move(values);
  m.dim = dim;
  m.lattice = lattice;
  m.validate();
  m.eta = fitted_exponent(m);
  return m;
}

CovarianceModel CovarianceModel::white_noise(int dim) {
  CovarianceModel m;
  m.family = CovFamily::white_noise;
  m.dim = dim;
  m.lattice = true;
  m.validate();
  return m;
}

void CovarianceModel::validate() const {
  if (dim != 1 && dim != 2) throw DomainError("covariance: dimension must be 1 or 2");
  switch (family) {
    case CovFamily::cauchy:
      if (!(eta > 0.0) || !std::isfinite(eta)) throw DomainError("cauchy: eta must be > 0");
      break;
    case CovFamily::exp_decay:
      if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("exp_decay: lambda must be > 0");
      break;
    case CovFamily::user_grid: {
      const auto& l = grid_lags;
      const auto& v = grid_values;
      if (l.size() != v.size() || l.size() < 2) throw DomainError("user_grid: need >= 2 matching lags/values");
      if (l[0] != 0.0 || v[0] != 1.0) throw DomainError("user_grid: first entry must be (0, 1)");
      for (std::size_t i = 1; i < l.size(); ++i) {
        if (!(l[i] > l[i - 1])) throw DomainError("user_grid: lags must ascend");
        if (!(std::fabs(v[i]) < 1.0)) throw DomainError("user_grid: |rho| must be < 1 off the origin");
      }
      break;
    }
    case CovFamily::white_noise: break;
  }
}

double CovarianceModel::correlation(double r) const {
  r = std::fabs(r);
  switch (family) {
    case CovFamily::cauchy: return std::pow(1.0 + r * r, -0.5 * eta);
    case CovFamily::exp_decay: return std::exp(-lambda * r);
    case CovFamily::white_noise: return r == 0.0 ? 1.0 : 0.0;
    case CovFamily::user_grid: {
      const auto& l = grid_lags;
      const auto& v = grid_values;
      if (r >= l.back()) {
        if (v.back() == 0.0 || r == l.back()) return v.back();
        return v.back() * std::pow(r / l.back(), -eta);
      }
      const auto it = std::upper_bound(l.begin(), l.end(), r);
      const std::size_t i = static_cast<std::size_t>(it - l.begin());
      const double w = (r - l[i - 1]) / (l[i] - l[i - 1]);
      return (1.0 - w) * v[i - 1] + w * v[i];
    }
  }
  return 0.0;
}

double CovarianceModel::tail_exponent() const {
  switch (family) {
    case CovFamily::cauchy: return eta;
    case CovFamily::user_grid: return eta;
    default: return kInf;
  }
}

bool CovarianceModel::nonnegative() const {
  if (family != CovFamily::user_grid) return true;
  for (double v : grid_values) {
    if (v < 0.0) return false;
  }
  return true;
}

std::string CovarianceModel::describe() const {
  std::ostringstream os;
  os << to_string(family);
  switch (family) {
    case CovFamily::cauchy: os << "(eta=" << shortest(eta) << ")"; break;
    case CovFamily::exp_decay: os << "(lambda=" << shortest(lambda) << ")"; break;
    case CovFamily::user_grid: os << "(" << grid_lags.size() << " lags, fitted eta=" << shortest(eta) << ")"; break;
    case CovFamily::white_noise: break;
  }
  os << " d=" << dim << (lattice ? " lattice" : " continuous");
  return os.str();
}

double rho_power_integral(const CovarianceModel& model, int k) {
  if (k < 1) throw DomainError("rho_power_integral: k must be >= 1");
  model.validate();
  const double kk = static_cast<double>(k);
  switch (model.family) {
    case CovFamily::cauchy: {
      if (kk * model.eta <= model.dim * (1.0 + 1e-12)) return kInf;
      const double a = 0.5 * kk * model.eta;
      return model.lattice ? cauchy_lattice(model.dim, a) : cauchy_continuous(model.dim, a);
    }
    case CovFamily::exp_decay: return exp_power(model.dim, kk * model.lambda, model.lattice);
    case CovFamily::white_noise: return 0.0;
    case CovFamily::user_grid: return grid_power(model, k);
  }
  return kInf;
}

double rho_power_upper_bound(const CovarianceModel& model, double k) {
  const int d = model.dim;
  switch (model.family) {
    case CovFamily::cauchy: {
      const double ke = k * model.eta;
      if (ke <= d * (1.0 + 1e-12)) return kInf;
      // One-dimensional bound from Gautschi's inequality
      // Gamma(x + 1) / Gamma(x + 1/2) < sqrt(x + 1).
      auto one_d = [](double ke1) {
        const double x = 0.5 * (ke1 - 1.0);
        return std::sqrt(kPi) * std::sqrt(x + 1.0) / x;
      };
      if (d == 1) return one_d(ke);
      const double plane = kPi / (0.5 * ke - 1.0);
      // Lattice sums are dominated by the integral except on the axes.
      return model.lattice ? plane + 2.0 * one_d(ke) : plane;
    }
    case CovFamily::exp_decay: {
      const double c = k * model.lambda;
      if (d == 1) return 2.0 / c;
      return model.lattice ? 2.0 * kPi / (c * c) + 4.0 / c : 2.0 * kPi / (c * c);
    }
    case CovFamily::white_noise: return 0.0;
    case CovFamily::user_grid: return rho_power_integral(model, std::max(1, static_cast<int>(std::floor(k))));
  }
  return kInf;
}

bool at_divergence_boundary(const CovarianceModel& model, int k) {
  if (model.family != CovFamily::cauchy && model.family != CovFamily::user_grid) return false;
  return std::fabs(k * model.eta - model.dim) <= 1e-12 * model.dim;
}

}  // namespace xmem
