#include "xmem/measure.hpp"

#include <cmath>
#include <sstream>

#include "xmem/errors.hpp"
#include "xmem/numeric.hpp"

namespace xmem {

namespace {

std::vector<double> trapezoid_weights(const std::vector<double>& grid) {
  std::vector<double> w(grid.size(), 0.0);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double h = grid[i + 1] - grid[i];
    w[i] += 0.5 * h;
    w[i + 1] += 0.5 * h;
  }
  return w;
}

}  // namespace

FiniteMeasure::FiniteMeasure(std::vector<Atom> atoms, std::optional<DensityPart> density)
    : atoms_(std::move(atoms)), density_(std::move(density)) {
  double mass = 0.0;
  for (const auto& a : atoms_) {
    if (!std::isfinite(a.location)) throw DomainError("measure: non-finite atom location");
    if (!(a.weight > 0.0) || !std::isfinite(a.weight)) throw DomainError("measure: atom weights must be positive");
    mass += a.weight;
  }
  if (density_) {
    const auto& d = *density_;
    if (d.grid.size() != d.values.size() || d.grid.size() < 2) {
      throw DomainError("measure: density grid and values must match (>= 2 nodes)");
    }
    for (std::size_t i = 0; i < d.grid.size(); ++i) {
      if (!(d.values[i] >= 0.0) || !std::isfinite(d.values[i])) throw DomainError("measure: density values must be >= 0");
      if (i > 0 && !(d.grid[i] > d.grid[i - 1])) throw DomainError("measure: density grid must ascend");
    }
    const auto w = trapezoid_weights(d.grid);
    for (std::size_t i = 0; i < w.size(); ++i) mass += w[i] * d.values[i];
  }
  if (!(mass > 0.0) || !std::isfinite(mass)) throw DomainError("measure: total mass must be positive and finite");
  total_mass_ = mass;
}

FiniteMeasure FiniteMeasure::dirac(double location, double weight) {
  return FiniteMeasure({Atom{location, weight}});
}

FiniteMeasure FiniteMeasure::gaussian_density(double mean, double sd, double mass,
                                              double halfwidth_sd, int points) {
  if (!(sd > 0.0) || !(mass > 0.0) || points < 2 || !(halfwidth_sd > 0.0)) {
    throw DomainError("gaussian_density: bad parameters");
  }
  DensityPart d;
  d.grid.resize(points);
  d.values.resize(points);
  for (int i = 0; i < points; ++i) {
    const double z = -halfwidth_sd + 2.0 * halfwidth_sd * i / (points - 1);
    d.grid[i] = mean + sd * z;
    d.values[i] = mass * normal_pdf(z) / sd;
  }
  return FiniteMeasure({}, std::move(d));
}

double FiniteMeasure::mass_at_or_above(double lo) const {
  double m = 0.0;
  for (const auto& a : discretized()) {
    if (a.location >= lo) m += a.weight;
  }
  return m;
}

FiniteMeasure FiniteMeasure::scaled(double c) const {
  if (!(c > 0.0)) throw DomainError("measure: scale factor must be positive");
  auto atoms = atoms_;
  for (auto& a : atoms) a.weight *= c;
  auto density = density_;
  if (density) {
    for (auto& v : density->values) v *= c;
  }
  return FiniteMeasure(std::move(atoms), std::move(density));
}

std::vector<Atom> FiniteMeasure::discretized() const {
  std::vector<Atom> out = atoms_;
  if (density_) {
    const auto w = trapezoid_weights(density_->grid);
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double weight = w[i] * density_->values[i];
      if (weight > 0.0) out.push_back({density_->grid[i], weight});
    }
  }
  return out;
}

std::string FiniteMeasure::describe() const {
  std::ostringstream os;
  os << "atoms[";
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    os << (i ? "," : "") << shortest(atoms_[i].location) << ":" << shortest(atoms_[i].weight);
  }
  os << "]";
  if (density_) {
    os << " density[" << shortest(density_->grid.front()) << ".." << shortest(density_->grid.back()) << ", "
       << density_->grid.size() << " nodes]";
  }
  return os.str();
}

}  // namespace xmem
