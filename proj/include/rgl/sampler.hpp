#pragma once
#include <cstdint>
#include <functional>

#include "rgl/density.hpp"
#include "rgl/map_family.hpp"

namespace rgl {

// Start-point sampler: returns the index-th start point for a given seed.
using StartSampler = std::function<double(std::uint64_t seed, std::int64_t index)>;

StartSampler lebesgue_sampler(const MapFamily& f);
// Runs `burn` noisy steps from a Lebesgue point and returns the endpoint.
StartSampler birkhoff_tail_sampler(const MapFamily& f, const NoiseKernel& k, int burn = 1000);
// Inverse-CDF sampling from a piecewise-constant density.
StartSampler density_sampler(const Density& d);

}  // namespace rgl
