#pragma once
#include <cstdint>
#include <utility>
#include <vector>

#include "rgl/map_family.hpp"

namespace rgl {

enum class Sidedness { OneSided, TwoSided };

// A parameter word. Entry i is the parameter applied at step i (x_{i+1} = f_{w[i]}(x_i)).
// Draws are keyed by (seed, absolute index), so any index can be read, extension keeps
// the prefix, and a shifted view reads the same stream.
class Realization {
 public:
  NoiseKernel kernel;
  std::uint64_t seed = 0;
  std::int64_t length = 0;
  Sidedness sided = Sidedness::OneSided;
  std::int64_t past_depth = 0;
  std::int64_t offset = 0;  // shift applied by shifted()

  double param(std::int64_t i) const { return kernel.sample(seed, stream_id, i + offset); }
  // Entries [-past_depth, length) for two-sided words, [0, length) otherwise.
  std::vector<double> parameters() const;
  std::vector<double> window(std::int64_t from, std::int64_t count) const;
  void extend(std::int64_t n) {
    if (n > length) length = n;
  }
  Realization shifted(std::int64_t s) const;
  Realization one_sided() const;

  std::uint64_t stream_id = 0x6e6f697365ULL;
};

Realization make_realization(const NoiseKernel& kernel, std::uint64_t seed, std::int64_t n,
                             Sidedness sided = Sidedness::OneSided, std::int64_t past_depth = 40);

struct OrbitRecord {
  double x0 = 0.0;
  std::vector<double> points;     // n+1 entries
  std::vector<double> log_deriv;  // log|f'| per step, -inf at a critical hit
  std::vector<double> t_used;
  int degenerate_steps = 0;
};

// Skew-product state: step index k and the fiber point.
struct SkewState {
  std::int64_t k = 0;
  double x = 0.0;
};

OrbitRecord random_orbit(const MapFamily& f, const Realization& w, double x0, std::int64_t n);
SkewState skew_step(const MapFamily& f, Realization& w, SkewState s);
// Orbit of the N-step system: point j is base point N j, log_deriv j the sum over block j.
OrbitRecord powered_orbit(const MapFamily& f, const Realization& w, double x0, int N, std::int64_t n);

}  // namespace rgl
