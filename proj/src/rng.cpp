#include "rgl/rng.hpp"

namespace rgl {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_draw(std::uint64_t seed, std::uint64_t stream, std::int64_t index) {
  std::uint64_t h = splitmix64(seed ^ splitmix64(stream));
  return splitmix64(h ^ splitmix64(static_cast<std::uint64_t>(index) + 0x632BE59BD9B4E019ULL));
}

double uniform01(std::uint64_t seed, std::uint64_t stream, std::int64_t index) {
  return static_cast<double>(hash_draw(seed, stream, index) >> 11) * 0x1.0p-53;
}

std::uint64_t child_seed(std::uint64_t seed, std::uint64_t tag) {
  return splitmix64(splitmix64(seed) + 0xA24BAED4963EE407ULL * (tag + 1));
}

}  // namespace rgl
