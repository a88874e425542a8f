#pragma once

#include <cstdint>
#include <cstddef>

namespace robdoa::rng {

// Counter-based generation: every draw is a pure function of
// (seed, stream, index), so any sample can be recomputed in isolation and
// workers can consume disjoint index ranges without shared state.

/// Purpose tag baked into the key so unrelated consumers never share a stream.
enum class Domain : std::uint32_t {
  state_control_points = 1,  // joint (x,u) sample set
  state_points = 2,          // state-only sample set
  successors = 3,            // per-point successor draws; id = point index
  pso_init = 4,
  pso_step = 5,
  sim_init = 6,              // id = trajectory index
  sim_noise = 7,             // id = trajectory index
  probes = 8,
};

struct Stream {
  Domain domain;
  std::uint64_t id = 0;
};

namespace detail {

struct Block {
  std::uint32_t w[4];
};

// Philox4x32-10.
inline Block philox(std::uint32_t c0, std::uint32_t c1, std::uint32_t c2,
                    std::uint32_t c3, std::uint32_t k0, std::uint32_t k1) {
  constexpr std::uint64_t kMul0 = 0xD2511F53ull;
  constexpr std::uint64_t kMul1 = 0xCD9E8D57ull;
  constexpr std::uint32_t kW0 = 0x9E3779B9u;
  constexpr std::uint32_t kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = kMul0 * c0;
    const std::uint64_t p1 = kMul1 * c2;
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    const std::uint32_t n0 = hi1 ^ c1 ^ k0;
    const std::uint32_t n1 = lo1;
    const std::uint32_t n2 = hi0 ^ c3 ^ k1;
    const std::uint32_t n3 = lo0;
    c0 = n0;
    c1 = n1;
    c2 = n2;
    c3 = n3;
    k0 += kW0;
    k1 += kW1;
  }
  return Block{{c0, c1, c2, c3}};
}

inline double to_unit(std::uint32_t lo, std::uint32_t hi) {
  const std::uint64_t bits =
      (static_cast<std::uint64_t>(hi) << 32) | static_cast<std::uint64_t>(lo);
  // 53 high bits -> [0, 1)
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// Uniform draw in [0, 1); pure function of its arguments.
inline double uniform01(std::uint64_t seed, Stream stream, std::uint64_t index) {
  const std::uint64_t block = index >> 1;
  const std::uint32_t dom = static_cast<std::uint32_t>(stream.domain);
  const detail::Block b = detail::philox(
      static_cast<std::uint32_t>(stream.id),
      static_cast<std::uint32_t>(stream.id >> 32),
      static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
      static_cast<std::uint32_t>(seed) ^ dom,
      static_cast<std::uint32_t>(seed >> 32) ^ (dom * 0x85EBCA6Bu));
  if (index & 1) return detail::to_unit(b.w[2], b.w[3]);
  return detail::to_unit(b.w[0], b.w[1]);
}

/// Uniform draw on [lo, hi); degenerate intervals yield lo.
inline double uniform(std::uint64_t seed, Stream stream, std::uint64_t index,
                      double lo, double hi) {
  return lo + uniform01(seed, stream, index) * (hi - lo);
}

}  // namespace robdoa::rng
