#pragma once
#include <vector>

namespace rgl {

// Piecewise-constant density on `bins` equal cells of [lo, hi). weights are density
// values, so mass = sum(weights) * bin_width.
struct Density {
  double lo = 0.0, hi = 1.0;
  std::vector<double> weights;

  Density() = default;
  Density(double lo, double hi, int bins);
  static Density uniform(double lo, double hi, int bins);

  int bins() const { return static_cast<int>(weights.size()); }
  double bin_width() const { return (hi - lo) / bins(); }
  double center(int i) const { return lo + (i + 0.5) * bin_width(); }
  double total_mass() const;
  void normalize();
  int bin_of(double x) const;

  // Spread `mass` uniformly over [a, b] (clipped to the support).
  void deposit_interval(double a, double b, double mass);
  // Same on the circle [0,1): a and b may be unreduced lifts with b - a <= 1.
  void deposit_circle_interval(double a, double b, double mass);
  Density rebinned(int new_bins) const;
  // Mass of [a, b] (clipped to the support).
  double mass_between(double a, double b) const;
};

// Total variation between the normalized versions of a and b.
double tv_distance(const Density& a, const Density& b);
double l1_distance(const Density& a, const Density& b);

}  // namespace rgl
