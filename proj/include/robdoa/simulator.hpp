#pragma once

#include <optional>
#include <vector>

#include "robdoa/controller.hpp"
#include "robdoa/grid.hpp"
#include "robdoa/plant.hpp"

namespace robdoa {

struct SimConfig {
  std::size_t trajectories = 1000;
  std::size_t max_steps = 200;
  double radius = 1e-3;  // |x| below this counts as converged
  std::uint64_t seed = 1;
  bool zero_noise = false;  // force the disturbance to zero

  void validate() const;
};

struct Trajectory {
  std::vector<std::vector<double>> states;  // x(0) .. x(k_end)
  std::vector<std::vector<double>> noises;  // e(0) .. e(k_end - 1)
  std::optional<std::size_t> converged_step;
  bool aborted = false;  // controller/plant evaluation failed mid-run
};

struct TrajectoryBatch {
  std::vector<Trajectory> trajectories;
};

/// Closed-loop runs x(k+1) = f(x, mu(x)) + e with e uniform on the
/// componentwise interval [-d(x, mu(x)), d(x, mu(x))]. Initial states are
/// uniform over the set cells of `doa_mask` (cell picked uniformly, then a
/// point within it). Each trajectory owns its noise stream, so batches are
/// reproducible for any worker count.
TrajectoryBatch simulate(const PlantSet& plant, const Controller& mu,
                         const CellMask& doa_mask, const SimConfig& cfg,
                         int workers = 0);

/// One closed-loop step from x; returns the successor and writes the noise
/// drawn for this step. Draw indices advance by the state dimension per step.
std::vector<double> closed_loop_step(const PlantSet& plant, const Controller& mu,
                                     std::span<const double> x,
                                     std::uint64_t seed, std::uint64_t trajectory,
                                     std::size_t step, bool zero_noise,
                                     std::span<double> noise_out);

struct SimSummary {
  std::size_t total = 0;
  std::size_t converged = 0;
  std::size_t aborted = 0;
  double fraction = 0.0;
  std::size_t median_step = 0;
  std::size_t p95_step = 0;
  double max_excursion = 0.0;  // largest |x| seen anywhere in the batch
};

SimSummary summarize(const TrajectoryBatch& batch);

}  // namespace robdoa
