#pragma once

#include <optional>
#include <string>

#include "robdoa/artifacts.hpp"
#include "robdoa/config.hpp"

namespace robdoa {

// Command layer shared by the CLI and the acceptance suite. Every command
// validates its config, writes its artifacts plus a manifest under
// config.output_dir, and returns the in-memory result for chaining.

struct PipelineSummary {
  double alpha_star = 0.0;
  double doa_volume = 0.0;
  std::optional<double> baseline_volume;
  std::optional<double> enlargement;
  std::size_t membership_violations = 0;
  double sim_fraction = 0.0;
  std::string text;  // human-readable report
};

NddEstimate run_ndd(const RunConfig& config);
/// Loads the decrease-domain artifacts a previous run_ndd wrote.
NddEstimate load_ndd(const RunConfig& config);

AlphaResult run_alpha(const RunConfig& config, const NddEstimate& ndd);
OptimizationResult run_optimize(const RunConfig& config);
Controller run_controller(const RunConfig& config, const NddEstimate& ndd);
TrajectoryBatch run_simulate(const RunConfig& config, const Controller& mu,
                             const CellMask& doa);
PipelineSummary run_pipeline(const RunConfig& config);

}  // namespace robdoa
