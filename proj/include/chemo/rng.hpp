#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace chemo::rng {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as
/// easy as 1, 2, 3"). Stateless: the output is a pure function of counter and key.
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t kM0 = 0xD2511F53u;
  constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u;
  constexpr std::uint32_t kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kW0;
    key[1] += kW1;
  }
  return ctr;
}

/// SplitMix64 finalizer; used to derive child seeds in the seed tree.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Deterministic child seed for index `child` of `parent`.
inline std::uint64_t child_seed(std::uint64_t parent, std::uint64_t child) {
  return splitmix64(splitmix64(parent) ^ splitmix64(child + 0x632BE59BD9B4E019ull));
}

/// Uniform in the open interval (0,1) from 64 random bits.
inline double to_unit_open(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// Named substreams sharing one seed.
enum class Stream : std::uint32_t {
  kNoise = 0,
  kInitialData = 1,
  kBootstrap = 2,
  kSynthetic = 3,
};

/// Raw 128 bits for (seed, stream, index, step).
inline std::array<std::uint32_t, 4> draw(std::uint64_t seed, Stream stream, std::uint32_t index,
                                         std::uint64_t step) {
  const std::array<std::uint32_t, 4> ctr = {static_cast<std::uint32_t>(step),
                                            static_cast<std::uint32_t>(step >> 32), index,
                                            static_cast<std::uint32_t>(stream)};
  const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed),
                                            static_cast<std::uint32_t>(seed >> 32)};
  return philox4x32(ctr, key);
}

/// Two uniforms in (0,1).
inline std::pair<double, double> uniform_pair(std::uint64_t seed, Stream stream, std::uint32_t index,
                                              std::uint64_t step) {
  const auto r = draw(seed, stream, index, step);
  const std::uint64_t a = (static_cast<std::uint64_t>(r[0]) << 32) | r[1];
  const std::uint64_t b = (static_cast<std::uint64_t>(r[2]) << 32) | r[3];
  return {to_unit_open(a), to_unit_open(b)};
}

/// Two independent standard normals (Box-Muller).
inline std::pair<double, double> gaussian_pair(std::uint64_t seed, Stream stream, std::uint32_t index,
                                               std::uint64_t step) {
  const auto [u1, u2] = uniform_pair(seed, stream, index, step);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(angle), r * std::sin(angle)};
}

}  // namespace chemo::rng
