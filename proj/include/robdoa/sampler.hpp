#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "robdoa/grid.hpp"
#include "robdoa/plant.hpp"
#include "robdoa/rng.hpp"

namespace robdoa {

/// Sampling budget for one estimation run. All draws derive from `seed`
/// through fixed stream tags, so reruns and different worker counts see the
/// same points.
struct SampleConfig {
  std::uint64_t seed = 1;
  std::size_t n_xu = 5'000'000;  // joint (x,u) points
  std::size_t n_succ = 500;      // successor draws per point
  std::size_t n_x = 1'000'000;   // state-only points

  void validate() const;
};

/// index-th point of the uniform stream on `box`.
void sample_box_point(const Box& box, std::uint64_t seed, rng::Stream stream,
                      std::size_t index, std::span<double> out);

/// Convenience batch form of sample_box_point.
std::vector<std::vector<double>> sample_box(const Box& box, std::size_t count,
                                            std::uint64_t seed,
                                            rng::Stream stream);

/// draw-th successor inside [lo, hi]; a zero-width dimension always yields
/// its (degenerate) center.
void successor_point(std::span<const double> lo, std::span<const double> hi,
                     std::uint64_t seed, std::uint64_t point_index,
                     std::size_t draw, std::span<double> out);

/// Uniform samples of the successor box of (x, u); the stream id is the
/// (x,u) point index so any draw is reproducible in isolation.
std::vector<std::vector<double>> sample_successors(const PlantSet& plant,
                                                   std::span<const double> x,
                                                   std::span<const double> u,
                                                   std::size_t count,
                                                   std::uint64_t seed,
                                                   std::uint64_t point_index);

}  // namespace robdoa
