#pragma once
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "rgl/density.hpp"
#include "rgl/gmy.hpp"
#include "rgl/map_family.hpp"
#include "rgl/orbit.hpp"

namespace rgl {

struct NoReturnError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TowerOptions {
  int depth = 40;            // past steps fed with Lebesgue data before the first measured shift
  int bins = 256;            // cells for densities on the inducing interval and on the circle
  int n_realizations = 16;   // shifts averaged by the projection
  int n_max = 30;            // partition horizon
  double min_element = 1e-5;        // precision floor of the full partitions behind densities
  double orbit_min_element = 3e-8;  // floor of the query-restricted partitions along tower orbits
  int truncation = 0;        // j-sum cutoff of the projection; 0 picks the 99th percentile of R
  double max_piece = 1.0 / 128;  // longest image deposited as a uniform block
  double convergence_tol = 1e-2;
};

// Parameters a partition at shift s reads: entries s .. s + n_max + N0. With mask_from set,
// entries at indices >= mask_from are replaced by the kernel center; elements with return
// time R <= mask_from - s do not change (they only read the prefix).
std::vector<double> shift_window(const Realization& w, std::int64_t s, int count, std::int64_t mask_from = INT64_MAX);

// nu_wbar for a two-sided realization, iterated from Lebesgue data placed at every shift
// below -depth. Only coordinates with negative index are read.
struct InducedMeasure {
  Density nu;            // on the inducing interval (lift coordinates)
  double K1 = 0.0;       // sup of all iterated densities
  double convergence_l1 = 0.0;  // L1 between normalized runs started at -depth and -depth/2
  int partitions = 0;
};
InducedMeasure induced_measure(const MapFamily& f, const Realization& w, const GmyConstants& c, const GmyOptions& gopt,
                               const TowerOptions& topt);

struct TowerStep {
  Realization next;   // shifted by R
  long double y = 0;  // image in lift coordinates of the inducing interval
  int R = 0;
};
// One step of the tower map from x in the inducing interval (lift coordinates).
TowerStep tower_map_step(const MapFamily& f, const Realization& w, long double x, const GmyConstants& c,
                         const GmyOptions& gopt, const TowerOptions& topt);

struct TowerOrbitStats {
  int n = 0;
  int H_n = 0;
  int S_n = 0;
  int R_n = 0;
};

// Counts along the orbit of (w, x) up to every horizon 1..n: hyperbolic times at rate lambda,
// satellite memberships (steps below R0 count, by convention), and returns.
std::vector<TowerOrbitStats> orbit_stats_series(const MapFamily& f, const Realization& w, long double x, int n,
                                                const GmyConstants& c, double lambda, const GmyOptions& gopt,
                                                const TowerOptions& topt);
TowerOrbitStats orbit_stats(const MapFamily& f, const Realization& w, long double x, int n, const GmyConstants& c,
                            double lambda, const GmyOptions& gopt, const TowerOptions& topt);

// eta R + S >= H, exactly on integers.
bool counting_inequality_check(const TowerOrbitStats& s, double eta);

struct CountingReport {
  int orbits = 0;             // completed orbits used
  int excluded = 0;           // orbits that fell into the unresolved residual
  int violations = 0;         // at the horizon
  int prefix_violations = 0;  // orbits failing at some earlier horizon
  int min_margin = 0;         // min of eta R + S - H at the horizon
  double mean_H = 0, mean_S = 0, mean_R = 0;
  int partitions = 0;
  bool pass() const { return orbits > 0 && violations == 0; }
};
// Runs tower orbits in batches that share a realization (partitions are built once per
// shift, restricted to the points landing there) until n_orbits have completed.
CountingReport counting_experiment(const MapFamily& f, const NoiseKernel& k, const GmyConstants& c,
                                   const GmyOptions& gopt, const TowerOptions& topt, int n_orbits, int horizon,
                                   double lambda, std::uint64_t seed);

struct TowerProjection {
  Density mu;                  // normalized, on [0,1)
  double mu_mass = 0.0;        // unnormalized mass per unit of Lebesgue data, i.e. the estimate of mu~(M)
  Density nu_mean;             // mean induced density over the measured shifts
  int truncation = 0;
  double truncation_residual = 0.0;  // nu(R > truncation) / nu(Delta)
  bool warning_truncation = false;
  std::vector<double> tail;          // nu(R > n) for n = 0..truncation-1, mean over shifts
  std::vector<double> integral_partial;  // sum_{U: R<=n} R nu(U) for n = 0..truncation (R capped)
  double return_integral = 0.0;      // int min(R, truncation) dnu
  double tail_sum = 0.0;             // sum_n nu(R > n)
  double fubini_gap = 0.0;
  double K1 = 0.0;
  double invariance_l1 = 0.0;        // mean nu vs one tower step of it
  std::vector<double> return_hist;   // Lebesgue mass of {R = n} over built partitions
  int partitions = 0;
  int shifts = 0;
};

TowerProjection tower_projection(const MapFamily& f, const NoiseKernel& k, const GmyConstants& c,
                                 const GmyOptions& gopt, const TowerOptions& topt, std::uint64_t seed);

// Thin views on tower_projection.
double return_time_integral(const MapFamily& f, const NoiseKernel& k, const GmyConstants& c, const GmyOptions& gopt,
                            const TowerOptions& topt, std::uint64_t seed);
Density project_stationary(const MapFamily& f, const NoiseKernel& k, const GmyConstants& c, const GmyOptions& gopt,
                           const TowerOptions& topt, std::uint64_t seed);

}  // namespace rgl
