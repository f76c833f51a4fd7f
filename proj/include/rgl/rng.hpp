#pragma once
#include <cstdint>

namespace rgl {

// Counter-based generator: every draw is a pure function of (seed, stream, index),
// so extending a word or sharding work across threads never changes a value.
std::uint64_t splitmix64(std::uint64_t x);

std::uint64_t hash_draw(std::uint64_t seed, std::uint64_t stream, std::int64_t index);

// Uniform in [0, 1) with 53 random bits.
double uniform01(std::uint64_t seed, std::uint64_t stream, std::int64_t index);

// Derive an independent child seed, e.g. one per orbit.
std::uint64_t child_seed(std::uint64_t seed, std::uint64_t tag);

namespace stream {
constexpr std::uint64_t noise = 0x6e6f697365ULL;
constexpr std::uint64_t start = 0x7374617274ULL;
constexpr std::uint64_t aux = 0x617578ULL;
}  // namespace stream

}  // namespace rgl
