#pragma once

#include <optional>
#include <string>
#include <vector>

namespace xmem {

struct Atom {
  double location = 0.0;
  double weight = 1.0;

  bool operator==(const Atom&) const = default;
};

/// Density part of a measure, tabulated on an ascending grid and integrated
/// with the trapezoid rule.
struct DensityPart {
  std::vector<double> grid;
  std::vector<double> values;

  bool operator==(const DensityPart&) const = default;
};

/// A finite positive measure on the real line: weighted atoms plus an
/// optional tabulated density. Used to weight exceedance levels.
class FiniteMeasure {
 public:
  FiniteMeasure(std::vector<Atom> atoms, std::optional<DensityPart> density = std::nullopt);

  static FiniteMeasure dirac(double location, double weight = 1.0);
  /// Mass `mass` spread as N(mean, sd^2) on `points` nodes over mean +- halfwidth_sd * sd.
  static FiniteMeasure gaussian_density(double mean, double sd, double mass = 1.0,
                                        double halfwidth_sd = 6.0, int points = 241);

  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::optional<DensityPart>& density() const { return density_; }
  bool is_atomic() const { return !density_.has_value(); }

  double total_mass() const { return total_mass_; }
  /// mu([lo, +inf)).
  double mass_at_or_above(double lo) const;

  FiniteMeasure scaled(double c) const;

  /// Atoms plus the density nodes carrying their trapezoid weights. Integrals
  /// against the measure are sums over this list.
  std::vector<Atom> discretized() const;

  std::string describe() const;

  bool operator==(const FiniteMeasure&) const = default;

 private:
  std::vector<Atom> atoms_;
  std::optional<DensityPart> density_;
  double total_mass_ = 0.0;
};

}  // namespace xmem
