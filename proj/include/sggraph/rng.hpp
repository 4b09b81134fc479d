#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace sggraph {

// Stream key derivation. All random streams in the library are mt19937_64
// engines seeded from a 64-bit master seed through splitmix64 mixing, keyed
// by a small stream tag plus the integer payload that identifies the stream
// (edge coordinates, replica index). The rule is:
//
//   seed = mix(... mix(mix(master ^ tag) ^ w0) ... ^ wn)
//
// so stream identity never depends on container iteration order.
inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace stream_tag {
inline constexpr std::uint64_t edge_births = 0x45424952ULL;    // per-edge marked Poisson stream
inline constexpr std::uint64_t initial_rects = 0x494e4954ULL;  // initial rectangles at time 0
inline constexpr std::uint64_t clan = 0x434c414eULL;           // backward clan construction
inline constexpr std::uint64_t replica = 0x5245504cULL;        // per-replica master seeds
}  // namespace stream_tag

inline constexpr std::uint64_t pack_coords(int x, int y) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)) << 32) |
         static_cast<std::uint64_t>(static_cast<std::uint32_t>(y));
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag) {
  return splitmix64(master ^ tag);
}

template <typename... Words>
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag, Words... words) {
  std::uint64_t s = splitmix64(master ^ tag);
  ((s = splitmix64(s ^ static_cast<std::uint64_t>(words))), ...);
  return s;
}

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed) { return Engine(seed); }

// Hand-rolled variate transforms. <random> distributions are not pinned down
// by the standard, so reproducible output across library versions needs fixed
// transforms over the (fully specified) mt19937_64 bit stream.

// Uniform on [0,1) with 53-bit resolution.
inline double uniform01(Engine& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// Uniform on the open interval (0,1); used for rectangle marks.
inline double uniform_open01(Engine& g) {
  return (static_cast<double>(g() >> 11) + 0.5) * 0x1.0p-53;
}

// Exponential with mean 1.
inline double exponential1(Engine& g) { return -std::log1p(-uniform01(g)); }

// Exponential with rate lambda.
inline double exponential(Engine& g, double rate) { return exponential1(g) / rate; }

// Uniform integer in [0, n).
inline std::uint64_t uniform_below(Engine& g, std::uint64_t n) {
  // Lemire-style rejection; unbiased and fast for the small n used here.
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = g();
    if (r >= threshold) return r % n;
  }
}

}  // namespace sggraph
