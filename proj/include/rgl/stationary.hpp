#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "rgl/density.hpp"
#include "rgl/map_family.hpp"

namespace rgl {

// Annealed Ulam operator in CSR form; row i holds the transition fractions out of bin i.
struct UlamOperator {
  int bins = 0;
  int kernel_samples = 0;
  double lo = 0.0, hi = 1.0;
  std::vector<std::int64_t> row_ptr;
  std::vector<int> col;
  std::vector<double> val;

  double row_sum(int i) const;
  // v P for a row vector v
  std::vector<double> left_apply(const std::vector<double>& v) const;
};

// Entry (i, j) = mean over kernel nodes of Leb(bin_i and f_t^-1 bin_j) / Leb(bin_i), from the
// exact branch preimages of the bin edges.
UlamOperator build_ulam(const MapFamily& f, const NoiseKernel& k, int bins, int kernel_samples, int workers = 1);

struct UlamResult {
  Density density;
  int iterations = 0;
  double residual = 0.0;  // ||vP - v||_1 at exit
};
// Power iteration from the uniform vector to residual <= tol; throws on 1e5 iterations.
UlamResult ulam_stationary(const UlamOperator& op, double tol = 1e-12, int max_iter = 100000);

// Pooled occupation histogram of `seeds` orbits after a burn-in, normalized.
Density birkhoff_histogram(const MapFamily& f, const NoiseKernel& k, int seeds, std::int64_t n_steps, int bins,
                           std::uint64_t seed, int workers = 1, std::int64_t burn_in = 1000);

struct ComponentReport {
  int k = 0;
  std::vector<double> masses;  // start-point share of each cluster
  double silhouette = 1.0;     // only meaningful for k >= 2
  bool indeterminate = false;
  double max_tv_within = 0.0;
};
// Occupation histograms of the N-step system from `starts` starts, clustered by TV < threshold.
ComponentReport n_ergodic_components(const MapFamily& f, const NoiseKernel& k, int N, int starts,
                                     std::int64_t n_steps, int bins, std::uint64_t seed, int workers = 1,
                                     double threshold = 0.2);

struct StabilityCurve {
  std::vector<double> epsilons;
  std::vector<double> exponents;
  std::vector<double> distances_to_limit;
  std::vector<Density> measures;
  Density limit;          // Ulam density of the unperturbed map (or the smallest epsilon if that fails)
  double limit_exponent = 0.0;
  bool limit_is_deterministic = true;
};

// int int log|f_t'(x)| dmu(x) dtheta(t), by midpoint quadrature inside each bin.
double density_exponent(const MapFamily& f, const NoiseKernel& k, const Density& mu, int t_nodes = 16,
                        int x_nodes = 16);

StabilityCurve stability_sweep(const MapFamily& f, double center, const std::vector<double>& epsilons, int bins,
                               int kernel_samples, int workers = 1);

struct QuadraticRow {
  double a = 0.0;
  double exponent = 0.0;
  int period = 0;  // 0 = no cycle of period <= 64 found
  std::string attractor() const { return period > 0 ? "periodic" : "chaotic"; }
  double cycle_multiplier = 0.0;  // |(f^p)'| along the detected cycle
};
std::vector<QuadraticRow> quadratic_counterexample(const std::vector<double>& a_values, std::int64_t n_steps,
                                                   int seeds, std::uint64_t seed);

// |int int phi(f_t x) dmu dtheta - int phi dmu| for phi = cos, sin(2 pi m x), m = 1..modes.
std::vector<double> stationarity_residuals(const MapFamily& f, const NoiseKernel& k, const Density& mu,
                                           int modes = 4, int t_nodes = 32, int x_nodes = 16);

}  // namespace rgl
