#include "xmem/transform.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "xmem/errors.hpp"
#include "xmem/numeric.hpp"

namespace xmem {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double saturate(double v) {
  if (v >= 1e300) return kInf;
  if (v <= -1e300) return -kInf;
  return v;
}

std::string with_param(const char* name, double p) {
  return std::string(name) + "(" + shortest(p) + ")";
}

}  // namespace

const char* to_string(TransformKind k) {
  switch (k) {
    case TransformKind::monotone_increasing: return "monotone_increasing";
    case TransformKind::monotone_decreasing: return "monotone_decreasing";
    case TransformKind::even_composed: return "even_composed";
  }
  return "?";
}

Transform::Transform(TransformKind kind, Fn base, DomainSign sign, std::string label,
                     std::optional<Fn> inverse_hint)
    : kind_(kind), base_(std::move(base)), sign_(sign), label_(std::move(label)),
      inverse_(std::move(inverse_hint)) {
  if (!base_) throw DomainError("transform: empty function");
  switch (kind_) {
    case TransformKind::monotone_increasing:
      image_lo_ = saturate(base_(-1e300));
      image_hi_ = saturate(base_(1e300));
      break;
    case TransformKind::monotone_decreasing:
      image_lo_ = saturate(base_(1e300));
      image_hi_ = saturate(base_(-1e300));
      break;
    case TransformKind::even_composed:
      image_lo_ = base_(0.0);
      image_hi_ = saturate(base_(1e300));
      break;
  }
}

Transform Transform::identity() {
  Transform t(TransformKind::monotone_increasing, [](double x) { return x; },
              DomainSign::signed_values, "identity", Fn([](double u) { return u; }));
  t.preset_ = "identity";
  return t;
}

Transform Transform::exp_sq(double alpha) {
  if (!(alpha > 0.0)) throw DomainError("exp_sq: alpha must be > 0");
  Transform t(
      TransformKind::even_composed, [alpha](double x) { return std::exp(x * x / (2.0 * alpha)); },
      DomainSign::nonnegative, with_param("exp_sq", alpha),
      Fn([alpha](double u) { return std::sqrt(2.0 * alpha * std::log(u)); }));
  t.preset_ = "exp_sq";
  t.param_ = alpha;
  return t;
}

Transform Transform::abs_exp_sq(double alpha) {
  Transform t = exp_sq(alpha);
  t.label_ = with_param("abs_exp_sq", alpha);
  t.preset_ = "abs_exp_sq";
  return t;
}

Transform Transform::signed_exp(double beta) {
  if (!(beta > 0.0)) throw DomainError("signed_exp: beta must be > 0");
  const double b2 = beta * beta;
  Transform t(
      TransformKind::monotone_increasing,
      [b2](double x) { return std::copysign(std::expm1(x * x / b2), x); },
      DomainSign::signed_values, with_param("signed_exp", beta),
      Fn([beta](double u) { return std::copysign(beta * std::sqrt(std::log1p(std::fabs(u))), u); }));
  t.preset_ = "signed_exp";
  t.param_ = beta;
  return t;
}

Transform Transform::preset(const std::string& name, double param) {
  if (name == "identity") return identity();
  if (name == "exp_sq") return exp_sq(param);
  if (name == "abs_exp_sq") return abs_exp_sq(param);
  if (name == "signed_exp") return signed_exp(param);
  throw DomainError("unknown transform preset '" + name + "'");
}

double Transform::operator()(double y) const {
  return kind_ == TransformKind::even_composed ? base_(std::fabs(y)) : base_(y);
}

void Transform::validate() const {
  constexpr int kProbes = 1000;
  double prev = 0.0;
  for (int i = 0; i < kProbes; ++i) {
    const double y = -10.0 + 20.0 * i / (kProbes - 1);
    const double v = (*this)(y);
    if (std::isnan(v)) throw DomainError("transform " + label_ + ": NaN on probe grid");
    if (kind_ == TransformKind::even_composed) {
      if (v != (*this)(-y)) throw DomainError("transform " + label_ + ": not even");
      if (y > 0.0 && v < prev) throw DomainError("transform " + label_ + ": base not nondecreasing");
    } else if (i > 0) {
      const bool bad = kind_ == TransformKind::monotone_increasing ? v < prev : v > prev;
      if (bad) throw DomainError("transform " + label_ + ": not monotone as declared");
    }
    prev = v;
  }
}

bool in_image_closure(const Transform& g, double u) {
  return !std::isnan(u) && u >= g.image_lo() && u <= g.image_hi();
}

double generalized_inverse(const Transform& g, double u) {
  if (!in_image_closure(g, u)) {
    std::ostringstream os;
    os << "generalized_inverse: level " << u << " outside the image of " << g.label();
    throw DomainError(os.str());
  }
  if (g.has_inverse_hint()) return g.inverse_hint(u);

  // Work with an increasing function h and target level w.
  const bool decreasing = g.kind() == TransformKind::monotone_decreasing;
  const bool even = g.kind() == TransformKind::even_composed;
  auto h = [&](double x) { return decreasing ? -g.base(x) : g.base(x); };
  const double w = decreasing ? -u : u;

  if (even && h(0.0) >= w) return 0.0;
  double lo = even ? 0.0 : -1.0, hi = 1.0;
  while (h(hi) < w) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) return kInf;
  }
  while (!even && h(lo) >= w) {
    hi = lo;
    lo *= 2.0;
    if (lo < -1e300) return -kInf;
  }
  // Invariant: h(lo) < w <= h(hi).
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= 1e-12 * std::max(1.0, std::fabs(mid)) || mid == lo || mid == hi) break;
    (h(mid) >= w ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace xmem
