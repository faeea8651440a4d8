#pragma once

// Subordination transforms X = G(Y) and their generalized inverses.

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace xmem {

enum class TransformKind { monotone_increasing, monotone_decreasing, even_composed };
enum class DomainSign { signed_values, nonnegative, nonpositive };

const char* to_string(TransformKind k);

/// A transform G. For `even_composed` the stored base function is defined on
/// [0, inf) and nondecreasing there; G(y) = base(|y|).
class Transform {
 public:
  using Fn = std::function<double(double)>;

  Transform(TransformKind kind, Fn base, DomainSign sign, std::string label,
            std::optional<Fn> inverse_hint = std::nullopt);

  static Transform identity();
  /// exp(x^2 / (2 alpha)), even. Pareto-type tail with index alpha.
  static Transform exp_sq(double alpha);
  /// The same function under the name used for volatility factors G(|y|).
  static Transform abs_exp_sq(double alpha);
  /// sgn(x) (exp(x^2 / beta^2) - 1), increasing.
  static Transform signed_exp(double beta);
  /// Builds a named preset; throws DomainError for unknown names.
  static Transform preset(const std::string& name, double param);

  double operator()(double y) const;
  /// Base function (the monotone piece; for even kinds, defined on [0, inf)).
  double base(double x) const { return base_(x); }

  TransformKind kind() const { return kind_; }
  DomainSign domain_sign() const { return sign_; }
  const std::string& label() const { return label_; }
  bool has_inverse_hint() const { return inverse_.has_value(); }
  double inverse_hint(double u) const { return (*inverse_)(u); }

  /// Preset name and parameter, empty for custom transforms.
  const std::string& preset_name() const { return preset_; }
  double preset_param() const { return param_; }

  /// Closure of the image of G: [image_lo, image_hi] (possibly infinite).
  double image_lo() const { return image_lo_; }
  double image_hi() const { return image_hi_; }

  /// Probe-grid check of the declared kind (monotonicity / evenness) on
  /// 1000 points of [-10, 10]. Throws DomainError on violation.
  void validate() const;

 private:
  TransformKind kind_;
  Fn base_;
  DomainSign sign_;
  std::string label_;
  std::optional<Fn> inverse_;
  std::string preset_;
  double param_ = 0.0;
  double image_lo_ = 0.0;
  double image_hi_ = 0.0;
};

/// G^-(u) = inf{x : G(x) >= u} for increasing G, inf{x : G(x) <= u} for
/// decreasing G. For even_composed G the inverse of the base on [0, inf) is
/// returned (the nonnegative preimage). Throws DomainError when u lies
/// outside the closure of the image.
double generalized_inverse(const Transform& g, double u);

/// True when u lies in the closure of the image of G.
bool in_image_closure(const Transform& g, double u);

}  // namespace xmem
