#pragma once

#include <string>

#include "robdoa/config.hpp"
#include "robdoa/controller.hpp"
#include "robdoa/doa.hpp"
#include "robdoa/ndd.hpp"
#include "robdoa/simulator.hpp"

namespace robdoa {

// Binary cell-mask file: magic, version, dimension, per-dim counts and box
// bounds, then the packed bit words. Fixed little-endian layout so reruns
// compare byte-identical.
void save_mask(const std::string& path, const CellMask& mask);
CellMask load_mask(const std::string& path);

void ensure_dir(const std::string& path);

/// Small JSON record tying artifacts to the exact configuration that made
/// them: config hash, seeds, command, library version. No timestamps.
void write_manifest(const std::string& path, const RunConfig& config,
                    const std::string& command);

void write_text(const std::string& path, const std::string& text);

/// alpha-search audit trail: one JSON record per containment check.
void write_alpha_trace_jsonl(const std::string& path, const AlphaSearchTrace& trace);
void write_alpha_trace_csv(const std::string& path, const AlphaSearchTrace& trace);

void write_ndd_meta(const std::string& path, const NddEstimate& est);

void write_training_csv(const std::string& path, const TrainingSet& ts);
void write_controller_json(const std::string& path, const Controller& c);

void write_trajectories_csv(const std::string& path, const TrajectoryBatch& batch);
void write_noises_csv(const std::string& path, const TrajectoryBatch& batch);

/// Plot-ready dump of one run: set cells of both masks, the admissible level
/// set, training pairs, and the fitted feedback sampled along the state axis.
void write_figure_bundle(const std::string& dir, const NddEstimate& ndd,
                         const CellMask& doa, const UniformGrid& gx,
                         const UniformGrid& gu, const Controller* controller);

std::string format_double(double v);

extern const char* const kVersion;

}  // namespace robdoa
