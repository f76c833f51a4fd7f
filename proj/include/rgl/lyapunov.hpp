#pragma once
#include <cstdint>
#include <vector>

#include "rgl/orbit.hpp"
#include "rgl/sampler.hpp"

namespace rgl {

struct ExponentEstimate {
  double value = 0.0;  // nats per iterate
  std::int64_t n_used = 0;
  double std_error = 0.0;
  std::vector<double> per_block_values;
  double sum = 0.0;  // exact (correctly rounded) sum of the used log-derivatives
  int degenerate_steps = 0;
  bool degenerate() const { return degenerate_steps > 0; }
};

// Mean of log|f'| after burn_in. Critical hits (-inf) are skipped and counted.
ExponentEstimate estimate_exponent(const OrbitRecord& orbit, std::int64_t burn_in, int n_blocks = 50);

// Exponent of the N-step system over n powered steps (N n base steps, no burn-in).
// The sum is taken over the same base terms as estimate_exponent, so
// power.sum == base.sum holds bit for bit.
ExponentEstimate estimate_power_exponent(const MapFamily& f, const NoiseKernel& k, std::uint64_t seed, double x0,
                                         int N, std::int64_t n);

struct AnnealedIntegral {
  double value = 0.0;
  double std_error = 0.0;
  int n_orbits_used = 0;
  int excluded = 0;
};

// Monte Carlo for the mean over blocks of -sum_{block} log|f'| with start points from `sampler`.
AnnealedIntegral annealed_contraction_integral(const MapFamily& f, const NoiseKernel& k, int N, int n_orbits,
                                               std::int64_t n_steps, const StartSampler& sampler, std::uint64_t seed,
                                               int workers = 1);

}  // namespace rgl
