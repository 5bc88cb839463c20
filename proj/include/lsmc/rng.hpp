#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace lsmc {

// Stream tags keep independent uses of one user seed apart.
enum class Stream : std::uint64_t {
  Scenarios = 0x5343454e,
  Controls = 0x4354524c,
  Synthetic = 0x53594e54,
};

// Generator for item `index` of `stream` under `seed`. Each path owns its
// generator, so results do not depend on path count or scheduling.
inline std::mt19937_64 substream(std::uint64_t seed, Stream stream, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

// Uniform on [0, 1) with 53 random bits. Spelled out because the standard
// distributions are not required to be identical across library vendors.
inline double uniform01(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

// Uniform integer in [0, n) by rejection, n > 0.
inline std::uint64_t uniform_below(std::mt19937_64& g, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = g();
  } while (x >= limit);
  return x % n;
}

// Standard normal via Box-Muller; portable for the same reason as uniform01.
inline double standard_normal(std::mt19937_64& g) {
  double u1;
  do {
    u1 = uniform01(g);
  } while (u1 <= 0.0);
  const double u2 = uniform01(g);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

}  // namespace lsmc
