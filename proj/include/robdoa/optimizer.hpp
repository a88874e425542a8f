#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <vector>

#include "robdoa/doa.hpp"
#include "robdoa/ndd.hpp"

namespace robdoa {

struct PsoConfig {
  int swarm = 20;
  int iterations = 50;
  double inertia = 0.729;
  double cognitive = 1.49445;
  double social = 1.49445;
  double entry_lower = -3.0;  // per-entry position bounds
  double entry_upper = 3.0;
  double velocity_clamp = 3.0;
  std::uint64_t seed = 1;

  void validate() const;
};

struct PsoResult {
  std::vector<double> best_position;
  double best_value = 0.0;
  std::vector<double> history;  // per-iteration best, non-decreasing
  std::size_t evaluations = 0;
};

/// Global-best particle swarm maximization of an arbitrary fitness over
/// `dims` coordinates. Deterministic for a fixed seed: fitness calls may run
/// in any order, but personal/global bests are folded in particle order once
/// per iteration.
PsoResult pso_maximize(const std::function<double(std::span<const double>)>& fitness,
                       int dims, const PsoConfig& cfg);

/// One evaluation of the admissible level-set volume for a parameter matrix.
struct VolumeEval {
  double m = 0.0;
  double alpha_star = 0.0;
  CellMask level_set;
  bool rank_ok = false;
  AlphaSearchTrace trace;
};

/// The volume objective: parameter matrix -> candidate function -> decrease
/// domains -> maximal admissible level set -> volume. Heavy per-point state
/// is cached once, so repeated evaluations only pay for classification.
class VolumeObjective {
 public:
  VolumeObjective(PlantSet plant, UniformGrid gx, UniformGrid gu,
                  MonomialBasis basis, NddParams ndd_params,
                  AlphaSearchParams alpha_params, double rank_tol = 1e-6);

  /// Rank-deficient (or non-finite) matrices score zero and are flagged,
  /// never thrown: a population optimizer must survive bad particles.
  /// Matrices are normalized to unit Frobenius norm first; the level-set
  /// lattice is scale-invariant at mask level, so this drops a redundant
  /// search direction.
  VolumeEval evaluate(const Eigen::MatrixXd& q) const;

  std::size_t basis_size() const { return basis_.size(); }
  const UniformGrid& state_grid() const { return gx_; }

 private:
  PlantSet plant_;
  UniformGrid gx_, gu_;
  MonomialBasis basis_;
  NddParams ndd_params_;
  AlphaSearchParams alpha_params_;
  double rank_tol_;
  std::shared_ptr<const PointCache> cache_;  // empty when streaming
};

struct OptimizationResult {
  Eigen::MatrixXd q_best;
  double m_best = 0.0;
  double alpha_best = 0.0;
  std::vector<double> history;
  std::size_t evaluations = 0;
  CellMask level_set;
};

/// Swarm search over the r*r flattened entries of the parameter matrix.
/// The reported m_best is re-evaluated from q_best at the end.
OptimizationResult maximize_volume(const VolumeObjective& objective,
                                   const PsoConfig& cfg);

}  // namespace robdoa
