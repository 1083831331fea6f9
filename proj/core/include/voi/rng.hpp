#pragma once

#include <cstdint>
#include <random>

namespace voi {

using Rng = std::mt19937_64;

/// Stream ids are partitioned by purpose in the top 16 bits so that, for
/// example, PSA row 7 and nested dataset 7 never share a stream.
enum class StreamPurpose : std::uint64_t {
  Psa = 1,
  Dataset = 2,
  Posterior = 3,
  Repetition = 4,
  NestedOuter = 5,
  SirPool = 6,
  Test = 15,
};

constexpr std::uint64_t stream_id(StreamPurpose purpose, std::uint64_t index) noexcept {
  return (static_cast<std::uint64_t>(purpose) << 48) | (index & ((std::uint64_t{1} << 48) - 1));
}

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Deterministic engine for (seed, stream_id). The two inputs go through
/// separate mixing rounds so (a, b) and (b, a) do not collide.
inline Rng derive_stream(std::uint64_t seed, std::uint64_t stream) {
  return Rng(splitmix64(splitmix64(seed) ^ splitmix64(~stream)));
}

/// A child seed, used when a whole sub-computation (one sweep repetition)
/// needs its own root seed rather than a single engine.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  auto rng = derive_stream(seed, stream);
  return rng();
}

}  // namespace voi
