#pragma once

#include <cstdint>
#include <random>

namespace plumeig {

using Rng = std::mt19937_64;

// Stream tags keep independent consumers of one episode seed apart.
enum class Stream : std::uint64_t {
  Placement = 1,
  Source = 2,
  Measurement = 3,
  Policy = 4,
  Exploration = 5,
  Replay = 6,
  Init = 7,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Generator for (seed, stream, index). Adding agents never perturbs the
/// streams of existing agent ids.
inline Rng make_stream(std::uint64_t seed, Stream stream, std::uint64_t index = 0) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(stream));
  h = splitmix64(h ^ (index + 0x632be59bd9b4e019ULL));
  return Rng(h);
}

}  // namespace plumeig
