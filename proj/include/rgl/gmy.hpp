#pragma once
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rgl/map_family.hpp"
#include "rgl/orbit.hpp"

namespace rgl {

using LInterval = std::pair<long double, long double>;

struct GmyOptions {
  double delta1 = 0.45;
  double delta0 = 0.0;  // 0 selects 2 delta1 / 3
  double p = std::numeric_limits<double>::quiet_NaN();  // NaN selects the point minimizing N0
  double lambda = 0.55;        // partition contraction rate; slower rates push R0 past what fits in memory
  double kappa_target = 0.9;
  int grid_pow = 10;
  double min_element = 3e-7;   // below this length the rest of a residual interval is left unresolved
  double min_preball = 1e-15;  // sweep stops below this scale
  int density_words = 32;
  std::uint64_t density_seed = 12345;
};

struct GmyConstants {
  double p = 0.0;
  double delta0 = 0.0;
  double delta1 = 0.0;
  int N0 = 0;
  int R0 = 0;
  double lambda = 0.0;
  double kappa = 0.0;
  double K = 0.0;
  double K0 = 0.0;
  double D0 = 0.0;
  double C0 = 0.0;
  double C2 = 0.0;
  double eta = 0.0;
  double L = 0.0;  // filled from a built partition (empirical satellite sum)
  // reading of the gap condition: sigma taken as inf |f'|
  double sigma = 0.0;
  double delta0_gap_bound = 0.0;  // largest delta0 allowed by 2 d0 K0^N0 sigma^-N0 < d1 K0^-N0
  bool gap_condition_holds = false;
  double max_preimage_distance = 0.0;  // density achieved at depth N0
  double lo() const { return p - delta0; }
  double hi() const { return p + delta0; }
};

// Least j such that the preimages of p up to depth j are within `radius` of every point,
// for every sampled word. Returns -1 when no j <= max_depth works.
int least_dense_depth(const MapFamily& f, const std::vector<std::vector<double>>& words, double p, double radius,
                      int max_depth, double* achieved = nullptr);

GmyConstants choose_inducing_domain(const MapFamily& f, const NoiseKernel& k, const GmyOptions& opt);

struct PartitionElement {
  long double a = 0, b = 0;
  int R = 0;  // return time, n + m
  int n = 0;  // hyperbolic time at creation
  int m = 0;  // extra steps onto the inducing interval
  std::vector<std::uint8_t> itinerary;
  double length() const { return static_cast<double>(b - a); }
};

struct GmyPartition {
  GmyConstants c;
  int n_max = 0;
  std::vector<double> params;  // one-sided word, step k uses params[k]
  std::vector<PartitionElement> elements;  // sorted by left endpoint
  // Indexed by n in [0, n_max]; entries below R0 follow the convention S^n = inducing interval.
  std::vector<std::vector<LInterval>> satellites;
  std::vector<double> satellite_mass;
  std::vector<double> residual_mass;
  std::vector<double> unresolved_mass;
  std::vector<LInterval> residual;  // Delta^{n_max}
  int no_return = 0;
  int candidates = 0;
  bool warning_large_residual = false;
  // A restricted build sweeps only residual intervals holding a query point and stops once
  // every query is captured or frozen; elements and satellites elsewhere are absent.
  bool restricted = false;
  int n_built = 0;

  double delta_mass() const { return 2.0 * c.delta0; }
  // element containing x (lift coordinate inside the inducing interval), or nullptr
  const PartitionElement* locate(long double x) const;
  bool in_satellite(int n, long double x) const;
  // number of satellite steps l in [1, upto] containing x (steps below R0 count as Delta)
  int satellite_count(long double x, int upto) const;
  double element_mass() const;
};

GmyPartition build_partition(const MapFamily& f, const std::vector<double>& params, const GmyConstants& c, int n_max,
                             const GmyOptions& opt, const std::vector<long double>* queries = nullptr);
GmyPartition build_partition(const MapFamily& f, const Realization& w, const GmyConstants& c, int n_max,
                             const GmyOptions& opt, const std::vector<long double>* queries = nullptr);

struct GmyVerifyReport {
  bool ok = true;
  int elements = 0;
  int failures = 0;
  double min_log_expansion_margin = INFINITY;  // min over probes of log|Df^R| + log kappa
  double max_distortion_ratio = 0.0;           // max of log-ratio / (K dist); <= 1 passes
  double empirical_K = 0.0;
  double max_endpoint_error = 0.0;
  double min_R = 0;
  std::string first_failure;
};

GmyVerifyReport verify_gmy(const MapFamily& f, const GmyPartition& P, int probes = 10);

std::vector<double> satellite_mass_series(const GmyPartition& P);

}  // namespace rgl

namespace rgl {

struct CoveringReport {
  int samples = 0;  // (x, n) pairs with n a hyperbolic time in [R0, n_max]
  int misses = 0;
  int in_elements = 0;
  int in_satellites = 0;
  long double first_miss_x = 0;
  int first_miss_n = 0;
};
// Samples points of the inducing interval and, for each, a hyperbolic time n at the partition
// rate; checks that x lies in an element created by step n or in the step-n satellite.
// Draws are indexed, so covering_points(c, m, seed) lists the first m candidates; a partition
// restricted to those points answers the check exactly when max_draws = m.
CoveringReport covering_check(const MapFamily& f, const GmyPartition& P, int n_samples, std::uint64_t seed,
                              std::int64_t max_draws = 0);
std::vector<long double> covering_points(const GmyConstants& c, std::int64_t count, std::uint64_t seed);

}  // namespace rgl
