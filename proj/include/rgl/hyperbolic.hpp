#pragma once
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rgl/orbit.hpp"
#include "rgl/sampler.hpp"

namespace rgl {

struct HyperbolicReport {
  double lambda = 0.0;
  std::vector<std::int64_t> times;  // sorted, 1-based
  double frequency = 0.0;           // |times| / horizon
  std::int64_t horizon = 0;
};

// n is a lambda-hyperbolic time when every tail sum over the last k steps of
// log(1/|f'|) is at most k log(lambda). One pass over prefix sums of
// log(1/|f'|) - log(lambda) against their running minimum.
HyperbolicReport hyperbolic_times(const std::vector<double>& log_deriv, double lambda);
HyperbolicReport hyperbolic_times(const OrbitRecord& orbit, double lambda);
// O(n^2) reference used by the tests.
std::vector<std::int64_t> hyperbolic_times_bruteforce(const std::vector<double>& log_deriv, double lambda);
// Flag per step (index n, 1-based; entry 0 unused).
std::vector<char> hyperbolic_flags(const std::vector<double>& log_deriv, double lambda);

struct OrbitStat {
  std::uint64_t seed = 0;
  double frequency = 0.0;
  double tail_average = 0.0;  // mean of log(1/|f'|) over the second half
};

std::vector<OrbitStat> per_orbit_stats(const MapFamily& f, const NoiseKernel& k, double lambda, int n_orbits,
                                       std::int64_t n_steps, const StartSampler& sampler, std::uint64_t seed,
                                       int workers = 1);

struct FrequencyEstimate {
  double zeta_hat = 0.0;           // 5% quantile of per-orbit frequencies
  double fraction_positive = 0.0;  // orbits with frequency > 0
  std::vector<OrbitStat> orbits;
};

FrequencyEstimate frequency_estimate(const MapFamily& f, const NoiseKernel& k, double lambda, int n_orbits,
                                     std::int64_t n_steps, const StartSampler& sampler, std::uint64_t seed,
                                     int workers = 1);

struct NueroResult {
  bool pass = false;
  double fraction_below = 0.0;  // share of orbits with tail average < -a0
  double mean_tail = 0.0;
  double max_tail = 0.0;
  std::vector<OrbitStat> orbits;
};

NueroResult nuero_check(const MapFamily& f, const NoiseKernel& k, double a0, int n_orbits, std::int64_t n_steps,
                        const StartSampler& sampler, std::uint64_t seed, int workers = 1, double lambda = 0.5);

// Orbit in extended precision, with the data needed to pull intervals back branch by branch.
struct LiftedOrbit {
  std::vector<long double> x;  // x[0..n], each in [0,1)
  std::vector<double> t;       // parameter used at each step
  std::vector<double> ld;      // log|f'| at each step
  std::vector<long double> F;  // lift of x[k] (x[k+1] plus an integer)
  std::vector<long double> dF; // slope at x[k]
};

LiftedOrbit lifted_orbit(const MapFamily& f, const Realization& w, long double x0, std::int64_t n);
// Same, reading parameters from a plain vector (step k uses params[k]).
LiftedOrbit lifted_orbit(const MapFamily& f, const std::vector<double>& params, long double x0, std::int64_t n);

// Pull the lift interval (lo, hi), placed around x[n], back along the branch of the orbit
// to an interval around x[0]. When trail is given, trail[k] receives the interval at step k.
std::pair<long double, long double> pull_back(const MapFamily& f, const LiftedOrbit& o, std::int64_t n, long double lo,
                                              long double hi,
                                              std::vector<std::pair<long double, long double>>* trail = nullptr);

// Pushes the lift interval (a, b) forward n steps along parameters; returns image lift
// endpoints with the right end tracked relative to the left one (valid while the image
// stays shorter than 1).
std::pair<long double, long double> push_interval(const MapFamily& f, const std::vector<double>& params,
                                                  std::int64_t from, std::int64_t n, long double a, long double b);

struct PreballReport {
  bool ok = true;
  long double lo = 0, hi = 0;       // the pre-ball around x
  double worst_contraction = 0.0;   // max of dist_{n-k} / (lambda^{k/2} dist_n), <= 1 when the lemma holds
  double empirical_C0 = 0.0;        // max |log Df^n(y) - log Df^n(z)| / dist(f^n y, f^n z)
  double C0_bound = 0.0;
  int pairs = 0;
  std::string message;
};

PreballReport preball_contraction_check(const MapFamily& f, const Realization& w, double x, std::int64_t n_hyp,
                                        double lambda, double delta1, int n_probe, std::uint64_t seed = 1);

// Distortion constant bound for pre-balls: sup|f''/f'| * sqrt(lambda) / (1 - sqrt(lambda)).
double preball_distortion_bound(double sup_log_slope, double lambda);

}  // namespace rgl
