#include "robdoa/simulator.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace robdoa {

void SimConfig::validate() const {
  if (trajectories < 1) throw ValidationError("sim.trajectories must be at least 1");
  if (max_steps < 1) throw ValidationError("sim.max_steps must be at least 1");
  if (!(radius > 0.0)) throw ValidationError("sim.radius must be positive");
}

namespace {

double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

Trajectory run_one(const PlantSet& plant, const Controller& mu,
                   const CellMask& doa_mask,
                   const std::vector<std::size_t>& set_cells,
                   const SimConfig& cfg, std::size_t traj) {
  const auto n = static_cast<std::size_t>(plant.state_dim());
  const UniformGrid& g = doa_mask.grid();

  Trajectory out;
  std::vector<double> x(n);
  {
    const rng::Stream stream{rng::Domain::sim_init, traj};
    const auto pick = static_cast<std::size_t>(
        rng::uniform01(cfg.seed, stream, 0) * static_cast<double>(set_cells.size()));
    const std::size_t cell = set_cells[std::min(pick, set_cells.size() - 1)];
    std::vector<double> lo(n), hi(n);
    g.cell_bounds(cell, lo, hi);
    for (std::size_t d = 0; d < n; ++d)
      x[d] = rng::uniform(cfg.seed, stream, 1 + d, lo[d], hi[d]);
  }
  out.states.push_back(x);

  std::vector<double> noise(n);
  for (std::size_t k = 0; k < cfg.max_steps; ++k) {
    if (norm2(x) <= cfg.radius) {
      out.converged_step = out.states.size() - 1;
      return out;
    }
    try {
      x = closed_loop_step(plant, mu, x, cfg.seed, traj, k, cfg.zero_noise, noise);
    } catch (const std::exception&) {
      out.aborted = true;
      return out;
    }
    out.states.push_back(x);
    out.noises.push_back(noise);
  }
  if (norm2(x) <= cfg.radius) out.converged_step = out.states.size() - 1;
  return out;
}

}  // namespace

std::vector<double> closed_loop_step(const PlantSet& plant, const Controller& mu,
                                     std::span<const double> x,
                                     std::uint64_t seed, std::uint64_t trajectory,
                                     std::size_t step, bool zero_noise,
                                     std::span<double> noise_out) {
  const auto n = static_cast<std::size_t>(plant.state_dim());
  const auto m = static_cast<std::size_t>(plant.input_dim());
  std::vector<double> u(m), fx(n), bound(n), next(n);
  mu.eval_into(x, u);
  plant.nominal_into(x, u, fx);
  plant.error_bound_into(x, u, bound);
  const rng::Stream stream{rng::Domain::sim_noise, trajectory};
  for (std::size_t d = 0; d < n; ++d) {
    double e = 0.0;
    if (!zero_noise)
      e = rng::uniform(seed, stream, step * n + d, -bound[d], bound[d]);
    if (std::fabs(e) > bound[d]) throw Error("noise exceeded its bound");
    noise_out[d] = e;
    next[d] = fx[d] + e;
  }
  return next;
}

TrajectoryBatch simulate(const PlantSet& plant, const Controller& mu,
                         const CellMask& doa_mask, const SimConfig& cfg,
                         int workers) {
  cfg.validate();
  if (doa_mask.grid().dim() != plant.state_dim())
    throw ValidationError("simulate: mask grid does not match the plant state");
  const auto set_cells = doa_mask.set_indices();
  if (set_cells.empty())
    throw ValidationError("simulate: the initial-state mask is empty");

  TrajectoryBatch batch;
  batch.trajectories.resize(cfg.trajectories);
#ifdef _OPENMP
  const int nthreads = workers <= 0 ? omp_get_max_threads() : workers;
#pragma omp parallel for schedule(static) num_threads(nthreads)
#else
  (void)workers;
#endif
  for (std::int64_t t = 0; t < static_cast<std::int64_t>(cfg.trajectories); ++t)
    batch.trajectories[static_cast<std::size_t>(t)] =
        run_one(plant, mu, doa_mask, set_cells, cfg, static_cast<std::size_t>(t));
  return batch;
}

SimSummary summarize(const TrajectoryBatch& batch) {
  if (batch.trajectories.empty())
    throw Error("summarize: batch contains no trajectories");
  SimSummary s;
  s.total = batch.trajectories.size();
  std::vector<std::size_t> steps;
  for (const auto& tr : batch.trajectories) {
    if (tr.aborted) ++s.aborted;
    if (tr.converged_step) {
      ++s.converged;
      steps.push_back(*tr.converged_step);
    }
    for (const auto& state : tr.states)
      s.max_excursion = std::max(s.max_excursion, norm2(state));
  }
  s.fraction = static_cast<double>(s.converged) / static_cast<double>(s.total);
  if (!steps.empty()) {
    std::sort(steps.begin(), steps.end());
    s.median_step = steps[steps.size() / 2];
    const auto p95_idx = static_cast<std::size_t>(
        0.95 * static_cast<double>(steps.size() - 1) + 0.5);
    s.p95_step = steps[std::min(p95_idx, steps.size() - 1)];
  }
  return s;
}

}  // namespace robdoa
